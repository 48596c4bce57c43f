#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "finsler/tensor.hpp"

namespace finsler {

// Geodesic spray G^i = 1/4 g^{il} ( [F^2]_{x^k y^l} y^k - [F^2]_{x^l} ),
// generic over the scalar so curvature can differentiate through it.
template <class S>
std::vector<S> spray_vector(const MetricSpec& m, std::span<const S> x, std::span<const S> y) {
  using D1 = Dual<S>;
  using D2 = Dual<Dual<S>>;
  const int n = m.dim();

  SquareMat<S> g = fundamental_matrix<S>(m, x, y);

  std::vector<S> rhs(n);
  {
    // mixed term: x seeded along the value of y (outer), y seeded e_l (inner)
    std::vector<D2> xs(n), ys(n);
    for (int i = 0; i < n; ++i) xs[i] = D2(D1(x[i], S(0.0)), D1(y[i], S(0.0)));
    for (int l = 0; l < n; ++l) {
      for (int k = 0; k < n; ++k) ys[k] = D2(D1(y[k], S(k == l ? 1.0 : 0.0)), D1(S(0.0), S(0.0)));
      rhs[l] = eval_F2<D2>(m, xs, ys).d.d;
    }
  }
  {
    std::vector<D1> xs(n), ys(n);
    for (int i = 0; i < n; ++i) ys[i] = D1(y[i], S(0.0));
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) xs[i] = D1(x[i], S(i == l ? 1.0 : 0.0));
      rhs[l] = 0.25 * (rhs[l] - eval_F2<D1>(m, xs, ys).d);
    }
  }
  return solve_linear(std::move(g), std::move(rhs));
}

struct SprayData {
  Eigen::VectorXd G;            // spray coefficients
  Eigen::MatrixXd N;            // nonlinear connection N^i_j = dG^i/dy^j
  std::vector<double> gamma_b;  // Berwald coefficients d2G^i/dy^j dy^k, dense n^3
  int n = 0;

  double gamma(int i, int j, int k) const {
    return gamma_b[(static_cast<size_t>(i) * n + j) * n + k];
  }
};

SprayData spray(const MetricSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Riemann curvature in natural coordinates,
//   R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k
//           - dG^i/dy^j dG^j/dy^k,
// plus its trace and requested flag curvatures.
struct FlagValue {
  Eigen::VectorXd u;
  double K = 0.0;
};

struct CurvatureReport {
  Eigen::MatrixXd R;
  double ric = 0.0;
  double S = 0.0;
  std::vector<FlagValue> flags;
};

Eigen::MatrixXd riemann_matrix(const MetricSpec& m, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y);

CurvatureReport riemann_ricci_flag(const MetricSpec& m, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& y,
                                   const std::vector<Eigen::VectorXd>& flag_dirs = {});

// Conformal bookkeeping for a metric e^{rho} F: derivatives of rho plus the
// raised gradient and the invariant Xi = theta^2 - theta_{x^k} y^k, all with
// respect to the base metric's fundamental tensor at (x, y).
struct ConformalData {
  Eigen::VectorXd rho_x;   // rho_k
  double theta = 0.0;      // rho_k y^k
  Eigen::VectorXd rho_up;  // rho^i = g^{ij} rho_j (base metric g)
  double xi = 0.0;
  double drho_norm2 = 0.0;  // g^{ij} rho_i rho_j
};

ConformalData conformal_data(const MetricSpec& conformal, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y);

// Spray of e^{rho} F assembled from the base spray by the conformal law
//   G~^i = G^i + theta y^i - 1/2 F^2 rho^i,
// cross-checked against direct AD of the scaled metric; for the constant-wind
// Randers family over a Euclidean background the component-wise closed forms
// are evaluated and checked as well.
SprayData conformal_spray(const MetricSpec& base, const ScalarField& rho,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                          double check_tol = 1e-9);

// Closed-form Ricci curvature at the unit normal of the coordinate hyperplane
// family for the bundled conformally flat Randers example
// (rho = sum_a ln(2+cos(pi x^a)), wind b d/dx^n over the Euclidean background).
double conformal_flat_normal_ricci(int n, double b, const Eigen::VectorXd& x);

}  // namespace finsler
