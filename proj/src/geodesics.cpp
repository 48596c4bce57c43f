#include "finsler/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "finsler/spray.hpp"
#include "finsler/tensor.hpp"
#include "finsler/threads.hpp"

namespace finsler {

Eigen::VectorXd GeodesicTrajectory::position(double t) const {
  Eigen::VectorXd z = solution.at(t);
  return z.head(z.size() / 2);
}

Eigen::VectorXd GeodesicTrajectory::velocity(double t) const {
  Eigen::VectorXd z = solution.at(t);
  return z.tail(z.size() / 2);
}

double GeodesicTrajectory::max_F_drift() const {
  double lo = F_along.front(), hi = lo;
  for (double f : F_along) {
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  return hi - lo;
}

GeodesicTrajectory integrate_geodesic(const MetricSpec& m, const Eigen::VectorXd& x0,
                                      const Eigen::VectorXd& y0, double T, double tol) {
  check_point(m, x0, y0);
  const int n = m.dim();

  OdeRhs rhs = [&m, n](double, const Eigen::VectorXd& z) {
    Eigen::VectorXd x = z.head(n), v = z.tail(n);
    std::vector<double> g = spray_vector<double>(m, to_std(x), to_std(v));
    Eigen::VectorXd out(2 * n);
    out.head(n) = v;
    for (int i = 0; i < n; ++i) out[n + i] = -2.0 * g[i];
    return out;
  };

  Eigen::VectorXd z0(2 * n);
  z0 << x0, y0;
  GeodesicTrajectory traj;
  traj.solution = integrate_ode(rhs, z0, 0.0, T, tol);

  for (const OdeSample& s : traj.solution.samples) {
    Eigen::VectorXd x = s.state.head(n), v = s.state.tail(n);
    traj.t_samples.push_back(s.t);
    traj.x_samples.push_back(x);
    traj.v_samples.push_back(v);
    traj.F_along.push_back(eval_F(m, x, v));
  }
  return traj;
}

Eigen::MatrixXd legendre_x_jacobian(const MetricSpec& m, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y) {
  using D1 = Dual<double>;
  const int n = m.dim();
  std::vector<D1> xs(n), ys(n);
  for (int i = 0; i < n; ++i) ys[i] = D1(y[i], 0.0);
  Eigen::MatrixXd out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) xs[i] = D1(x[i], i == j ? 1.0 : 0.0);
    std::vector<D1> l = f2_half_gradient_y<D1>(m, xs, ys);
    for (int i = 0; i < n; ++i) out(i, j) = l[i].d;
  }
  return out;
}

Eigen::MatrixXd gradient_field_jacobian(const MetricSpec& m, const ScalarField& f,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                        double sign) {
  FundamentalTensor ft = fundamental_tensor(m, x, y);
  Eigen::MatrixXd rhs = sign * field_hessian(f, x) - legendre_x_jacobian(m, x, y);
  return ft.g_inv * rhs;
}

FieldAnalysis field_analysis(const MetricSpec& m, const ScalarField& f,
                             const Eigen::VectorXd& x) {
  const int n = m.dim();
  Eigen::VectorXd df = field_gradient(f, x);
  if (df.norm() < 1e-12)
    throw FinslerError(ErrorCode::critical_point, "df vanishes at the evaluation point");

  LegendreInverse inv = legendre_inverse(m, x, df);
  FieldAnalysis fa;
  fa.grad = inv.y;
  fa.F_of_grad = inv.dual_norm;

  // div_sigma of the gradient field: trace of its Jacobian plus drift along
  // d ln(sigma) — g^{ij}(grad f) f_j is the gradient field itself.
  Eigen::MatrixXd jac = gradient_field_jacobian(m, f, x, inv.y, 1.0);
  fa.lap_sigma = jac.trace() + fa.grad.dot(dlog_sigma_dx(m, x));
  fa.lap_grad = fa.lap_sigma + s_curvature(m, x, fa.grad);
  return fa;
}

IsoparametricVerdict isoparametric_function_check(const MetricSpec& m, const ScalarField& f,
                                                  const Box& region, int samples,
                                                  double rel_tol, double abs_tol) {
  const int n = m.dim();
  if (region.lo.size() != n || region.hi.size() != n)
    throw FinslerError(ErrorCode::invalid_parameter, "region dimension mismatch");
  for (int i = 0; i < n; ++i)
    if (!(region.lo[i] < region.hi[i]))
      throw FinslerError(ErrorCode::invalid_parameter, "region must have positive extent");
  if (samples < 64)
    throw FinslerError(ErrorCode::invalid_parameter, "need at least 64 samples");

  std::mt19937_64 rng(0x150f0f5eedULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::VectorXd> pts(samples);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
      x[i] = region.lo[i] + (region.hi[i] - region.lo[i]) * unif(rng);
    pts[s] = x;
  }

  double fmin = field_value(f, pts[0]), fmax = fmin;
  for (const auto& x : pts) {
    double v = field_value(f, x);
    fmin = std::min(fmin, v);
    fmax = std::max(fmax, v);
  }
  const int kBuckets = 64;
  double width = (fmax - fmin) / kBuckets;
  if (!(width > 0))
    throw FinslerError(ErrorCode::insufficient_samples,
                       "f is constant over the region; no level structure to test");

  // Each sample is pinned to the center level of its bucket by a Newton
  // walk along df, so per-bucket spreads compare points on one exact level
  // set instead of mixing the trend of a(f) across the bucket width.
  struct Row {
    int bucket = -1;
    double a = 0, b = 0;
  };
  std::vector<Row> rows(samples);
  parallel_for(samples, [&](int s) {
    Eigen::VectorXd x = pts[s];
    double fv = field_value(f, x);
    int bucket = std::min(kBuckets - 1, static_cast<int>((fv - fmin) / width));
    double target = fmin + (bucket + 0.5) * width;
    bool on_level = false;
    for (int it = 0; it < 30; ++it) {
      Eigen::VectorXd df = field_gradient(f, x);
      double dn2 = df.squaredNorm();
      if (dn2 < 1e-16) return;  // critical region; drop the sample
      x += (target - fv) / dn2 * df;
      fv = field_value(f, x);
      if (std::abs(fv - target) <= 1e-12 * (1.0 + std::abs(target))) {
        on_level = true;
        break;
      }
    }
    if (!on_level) return;
    for (int i = 0; i < n; ++i)
      if (x[i] < region.lo[i] || x[i] > region.hi[i]) return;  // walked out
    if (field_gradient(f, x).norm() < 1e-8) return;
    FieldAnalysis fa = field_analysis(m, f, x);
    rows[s] = {bucket, fa.F_of_grad, fa.lap_sigma};
  });

  std::vector<std::vector<const Row*>> buckets(kBuckets);
  int kept = 0;
  for (const Row& r : rows)
    if (r.bucket >= 0) {
      buckets[r.bucket].push_back(&r);
      ++kept;
    }
  if (kept < 64)
    throw FinslerError(ErrorCode::insufficient_samples,
                       "too few regular points in the region");

  auto median_of = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
  };

  IsoparametricVerdict verdict;
  verdict.samples_used = kept;
  const double denom_floor = abs_tol / rel_tol;

  for (int bi = 0; bi < kBuckets; ++bi) {
    const auto& bucket = buckets[bi];
    if (static_cast<int>(bucket.size()) < 10) continue;  // not enough evidence
    std::vector<double> av, bv;
    for (const Row* r : bucket) {
      av.push_back(r->a);
      bv.push_back(r->b);
    }
    auto spread_rel = [&](const std::vector<double>& v, double med) {
      auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return (*hi - *lo) / std::max(std::abs(med), denom_floor);
    };
    double med_a = median_of(av), med_b = median_of(bv);
    verdict.transnormal_spread = std::max(verdict.transnormal_spread, spread_rel(av, med_a));
    verdict.laplacian_spread = std::max(verdict.laplacian_spread, spread_rel(bv, med_b));
    verdict.level_t.push_back(fmin + (bi + 0.5) * width);
    verdict.a_table.push_back(med_a);
    verdict.b_table.push_back(med_b);
    ++verdict.buckets_used;
  }
  if (verdict.buckets_used < 8)
    throw FinslerError(ErrorCode::insufficient_samples,
                       "fewer than 8 level buckets reached 10 points");

  verdict.is_transnormal = verdict.transnormal_spread < rel_tol;
  verdict.is_isoparametric = verdict.is_transnormal && verdict.laplacian_spread < rel_tol;
  return verdict;
}

}  // namespace finsler
