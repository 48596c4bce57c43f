#include "finsler/randers.hpp"

#include <cmath>
#include <random>

#include "finsler/density.hpp"
#include "finsler/hypersurface.hpp"

namespace finsler {

MetricSpec navigate(RiemannianSpec h, VectorField wind) {
  if (h.dim < 2) throw FinslerError(ErrorCode::invalid_parameter, "dimension must be at least 2");
  if (wind.dim() != h.dim)
    throw FinslerError(ErrorCode::invalid_parameter, "wind dimension does not match background");
  if (!h.euclidean() && static_cast<int>(h.entries.size()) != h.dim * h.dim)
    throw FinslerError(ErrorCode::invalid_parameter, "background matrix must have dim*dim entries");
  return MetricSpec{RandersNavigation{std::move(h), std::move(wind)}};
}

ClosedFormTensor closed_form_tensor(double b, int n, const Eigen::VectorXd& y) {
  if (!(b >= 0.0 && b < 1.0))
    throw FinslerError(ErrorCode::invalid_parameter, "wind strength must lie in [0, 1)");
  if (y.size() != n || y.norm() == 0.0)
    throw FinslerError(ErrorCode::invalid_parameter, "y must be a nonzero n-vector");
  const double lam = 1.0 - b * b;
  const int nn = n - 1;  // last-axis index

  ClosedFormTensor out;
  AlphaBetaSplit& sp = out.split;

  sp.alpha_lower = Eigen::MatrixXd::Zero(n, n);
  sp.alpha_upper = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < nn; ++a) {
    sp.alpha_lower(a, a) = 1.0 / lam;
    sp.alpha_upper(a, a) = lam;
  }
  sp.alpha_lower(nn, nn) = 1.0 / (lam * lam);
  sp.alpha_upper(nn, nn) = lam * lam;

  sp.b_lower = Eigen::VectorXd::Zero(n);
  sp.b_lower[nn] = -b / lam;
  sp.b_upper = Eigen::VectorXd::Zero(n);
  sp.b_upper[nn] = -lam * b;
  sp.beta_norm2 = b * b;

  sp.alpha = std::sqrt(y.dot(sp.alpha_lower * y));
  sp.beta = sp.b_lower.dot(y);
  out.F = sp.alpha + sp.beta;

  sp.alpha_y = Eigen::VectorXd(n);
  for (int a = 0; a < nn; ++a) sp.alpha_y[a] = y[a] / (lam * sp.alpha);
  sp.alpha_y[nn] = y[nn] / (lam * lam * sp.alpha);

  const double alpha = sp.alpha, beta = sp.beta, F = out.F;
  Eigen::MatrixXd g(n, n);
  for (int a = 0; a < nn; ++a) {
    for (int c = 0; c < nn; ++c) {
      g(a, c) = (a == c ? F / (lam * alpha) : 0.0) -
                beta * y[a] * y[c] / (alpha * alpha * alpha * lam * lam);
    }
    g(a, nn) = -b * y[a] / (lam * lam * alpha) -
               beta * y[a] * y[nn] / (lam * lam * lam * alpha * alpha * alpha);
    g(nn, a) = g(a, nn);
  }
  {
    const double la = lam * lam * alpha;
    const double t = y[nn] / la - b / lam;
    g(nn, nn) = (F / la) * (1.0 - y[nn] * y[nn] / (lam * lam * alpha * alpha)) + t * t;
  }
  out.g = g;

  Eigen::MatrixXd gi(n, n);
  const double b2ab = b * b * alpha + beta;
  const double F3 = F * F * F;
  for (int a = 0; a < nn; ++a) {
    for (int c = 0; c < nn; ++c)
      gi(a, c) = (a == c ? (alpha / F) * lam : 0.0) + b2ab * y[a] * y[c] / F3;
    gi(a, nn) = b * lam * alpha * y[a] / (F * F) + b2ab * y[a] * y[nn] / F3;
    gi(nn, a) = gi(a, nn);
  }
  gi(nn, nn) = lam * lam * alpha / F + 2.0 * b * lam * alpha * y[nn] / (F * F) +
               b2ab * y[nn] * y[nn] / F3;
  out.g_inv = gi;
  return out;
}

NormalShiftReport normal_and_curvature_shift(const MetricSpec& randers_metric,
                                             const HypersurfaceSpec& hyp,
                                             const Eigen::VectorXd& x, double isotropy_tol) {
  const auto* rn = randers_metric.as_randers();
  if (rn == nullptr)
    throw FinslerError(ErrorCode::invalid_parameter,
                       "normal_and_curvature_shift requires a navigation metric");
  const int n = randers_metric.dim();

  // Riemannian side: the same background with the wind switched off.
  MetricSpec riem = navigate(rn->h, constant_vector(Eigen::VectorXd::Zero(n)));

  ShapeReport fins = shape_operator(randers_metric, hyp, x);
  ShapeReport bar = shape_operator(riem, hyp, x);

  std::vector<double> xs(x.data(), x.data() + x.size());
  Eigen::VectorXd wind = from_std(rn->wind.eval<double>(xs));

  NormalShiftReport out;
  out.n_finsler = fins.normal;
  out.n_riemann = bar.normal;
  out.wind = wind;
  out.mu_finsler = fins.principal;
  out.mu_riemann = bar.principal;
  out.normal_residual = (fins.normal - (bar.normal + wind)).norm();

  // Isotropy of the S-curvature at x: S(x, y) = (n+1) k F(x, y) for all y.
  std::mt19937_64 rng(0x5eedu);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double kmin = 0.0, kmax = 0.0, ksum = 0.0;
  const int trials = 24;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd y(n);
    do {
      for (int i = 0; i < n; ++i) y[i] = unit(rng);
    } while (y.norm() < 0.3);
    const double k = s_curvature(randers_metric, x, y) /
                     ((n + 1) * eval_F(randers_metric, x, y));
    if (t == 0) {
      kmin = kmax = k;
    } else {
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
    }
    ksum += k;
  }
  if (kmax - kmin > isotropy_tol * (1.0 + std::abs(ksum / trials)))
    throw FinslerError(ErrorCode::isotropy_violation,
                       "S-curvature is not isotropic at this point");
  out.k = ksum / trials;

  double worst = 0.0;
  for (int a = 0; a < n - 1; ++a)
    worst = std::max(worst, std::abs(out.mu_finsler[a] - (out.mu_riemann[a] + out.k)));
  out.mu_residual = worst;
  return out;
}

}  // namespace finsler
