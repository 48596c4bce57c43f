#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "finsler/metric.hpp"

namespace finsler {

// g_ij(x,y) = 1/2 d^2 F^2 / dy^i dy^j, exact via one dual level per slot.
template <class S>
SquareMat<S> fundamental_matrix(const MetricSpec& m, std::span<const S> x, std::span<const S> y) {
  using D2 = Dual<Dual<S>>;
  const int n = m.dim();
  std::vector<D2> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = D2(Dual<S>(x[i], S(0.0)), Dual<S>(S(0.0), S(0.0)));

  SquareMat<S> g(n);
  std::vector<D2> ys(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = 0; k < n; ++k)
        ys[k] = D2(Dual<S>(y[k], S(k == j ? 1.0 : 0.0)), Dual<S>(S(k == i ? 1.0 : 0.0), S(0.0)));
      S gij = 0.5 * eval_F2<D2>(m, xs, ys).d.d;
      g(i, j) = gij;
      g(j, i) = gij;
    }
  }
  return g;
}

// 1/2 dF^2/dy — the Legendre (musical) map y -> g_y(y, .).
template <class S>
std::vector<S> f2_half_gradient_y(const MetricSpec& m, std::span<const S> x, std::span<const S> y) {
  using D1 = Dual<S>;
  const int n = m.dim();
  std::vector<D1> xs(n), ys(n);
  for (int i = 0; i < n; ++i) xs[i] = D1(x[i], S(0.0));
  std::vector<S> out(n);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) ys[k] = D1(y[k], S(k == l ? 1.0 : 0.0));
    out[l] = 0.5 * eval_F2<D1>(m, xs, ys).d;
  }
  return out;
}

struct FundamentalTensor {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  double det = 0.0;
};

struct CartanTensor {
  int n = 0;
  std::vector<double> c;   // C_ijk, fully symmetric, dense n^3
  Eigen::VectorXd mean;    // I_k = g^{ij} C_ijk

  double operator()(int i, int j, int k) const {
    return c[(static_cast<size_t>(i) * n + j) * n + k];
  }
};

FundamentalTensor fundamental_tensor(const MetricSpec& m, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y);

CartanTensor cartan_tensor(const MetricSpec& m, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y);

// Forward Legendre map: L(y)_i = g_ij(x,y) y^j = 1/2 [F^2]_{y^i}.
Eigen::VectorXd legendre_forward(const MetricSpec& m, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y);

struct LegendreInverse {
  Eigen::VectorXd y;     // the vector with L(y) = xi
  double dual_norm = 0;  // F(x, y) = F*(xi)
  int iterations = 0;
  double residual = 0;
};

// Damped Newton inversion of the Legendre map; the Jacobian of L is the
// fundamental tensor itself, so each step is one g-solve.
LegendreInverse legendre_inverse(const MetricSpec& m, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& xi, double tol = 1e-12,
                                 int max_iter = 50);

}  // namespace finsler
