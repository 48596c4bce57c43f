#include "finsler/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace finsler {

FundamentalTensor fundamental_tensor(const MetricSpec& m, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y) {
  check_point(m, x, y);
  std::vector<double> xs(x.data(), x.data() + x.size());
  std::vector<double> ys(y.data(), y.data() + y.size());
  FundamentalTensor out;
  out.g = to_eigen(fundamental_matrix<double>(m, xs, ys));

  Eigen::LDLT<Eigen::MatrixXd> ldlt(out.g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 0.0)
    throw FinslerError(ErrorCode::not_positive_definite, "fundamental tensor is not positive definite");
  out.g_inv = ldlt.solve(Eigen::MatrixXd::Identity(out.g.rows(), out.g.cols()));
  out.det = out.g.determinant();
  return out;
}

CartanTensor cartan_tensor(const MetricSpec& m, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y) {
  using D3 = Dual<Dual<Dual<double>>>;
  using D2 = Dual<Dual<double>>;
  using D1 = Dual<double>;
  check_point(m, x, y);
  const int n = m.dim();

  std::vector<D3> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = D3(x[i]);

  CartanTensor ct;
  ct.n = n;
  ct.c.assign(static_cast<size_t>(n) * n * n, 0.0);
  std::vector<D3> ys(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        for (int t = 0; t < n; ++t) {
          // three independent seed levels: i (outermost), j, k (innermost)
          D1 lvl1(y[t], t == k ? 1.0 : 0.0);
          D2 lvl2(lvl1, D1(t == j ? 1.0 : 0.0, 0.0));
          ys[t] = D3(lvl2, D2(D1(t == i ? 1.0 : 0.0, 0.0), D1(0.0, 0.0)));
        }
        double cijk = 0.25 * eval_F2<D3>(m, xs, ys).d.d.d;
        const int idx[3] = {i, j, k};
        int p[3];
        // write all permutations (C is fully symmetric)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
              if (a == b || b == c || a == c) continue;
              p[0] = idx[a];
              p[1] = idx[b];
              p[2] = idx[c];
              ct.c[(static_cast<size_t>(p[0]) * n + p[1]) * n + p[2]] = cijk;
            }
      }
    }
  }

  FundamentalTensor ft = fundamental_tensor(m, x, y);
  ct.mean = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += ft.g_inv(i, j) * ct(i, j, k);
    ct.mean[k] = s;
  }
  return ct;
}

Eigen::VectorXd legendre_forward(const MetricSpec& m, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) {
  check_point(m, x, y);
  std::vector<double> xs(x.data(), x.data() + x.size());
  std::vector<double> ys(y.data(), y.data() + y.size());
  return from_std(f2_half_gradient_y<double>(m, xs, ys));
}

LegendreInverse legendre_inverse(const MetricSpec& m, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& xi, double tol, int max_iter) {
  if (x.size() != m.dim() || xi.size() != m.dim())
    throw FinslerError(ErrorCode::invalid_parameter, "covector dimension does not match metric");
  if (xi.norm() == 0.0)
    throw FinslerError(ErrorCode::zero_covector, "cannot invert the Legendre map at xi = 0");

  // Initial guess: raise xi with the fundamental tensor frozen at the
  // Euclidean raise of xi (a Riemannian average of the fiber geometry).
  Eigen::VectorXd y = fundamental_tensor(m, x, xi).g_inv * xi;
  if (y.norm() == 0.0) y = xi;

  const double scale = 1.0 + xi.norm();
  Eigen::VectorXd r = legendre_forward(m, x, y) - xi;
  double rn = r.norm();
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd g = fundamental_tensor(m, x, y).g;
    Eigen::VectorXd step = g.ldlt().solve(r);
    double damp = 1.0;
    for (;;) {
      Eigen::VectorXd trial = y - damp * step;
      if (trial.norm() > 0.0) {
        Eigen::VectorXd rt = legendre_forward(m, x, trial) - xi;
        if (rt.norm() < rn || damp < 1e-4) {
          y = trial;
          r = rt;
          rn = rt.norm();
          break;
        }
      }
      damp *= 0.5;
      if (damp < 1e-8)
        throw FinslerError(ErrorCode::convergence_failure, "Legendre inversion stalled");
    }
    if (rn <= tol * scale) {
      LegendreInverse out;
      out.y = y;
      out.dual_norm = eval_F(m, x, y);
      out.iterations = it;
      out.residual = rn;
      return out;
    }
  }
  throw FinslerError(ErrorCode::convergence_failure, "Legendre inversion did not converge");
}

}  // namespace finsler
