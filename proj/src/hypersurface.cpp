#include "finsler/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "finsler/spray.hpp"
#include "finsler/tensor.hpp"
#include "finsler/threads.hpp"

namespace finsler {
namespace {

struct NormalData {
  LevelSetForm ls;
  double sign = 1.0;    // oriented covector is sign * df
  LegendreInverse inv;  // Legendre inverse of sign * df
  Eigen::VectorXd normal;
};

NormalData normal_data(const MetricSpec& m, const HypersurfaceSpec& hyp,
                       const Eigen::VectorXd& x) {
  const int n = m.dim();
  if (x.size() != n)
    throw FinslerError(ErrorCode::invalid_parameter, "point dimension mismatch");
  NormalData nd;
  nd.ls = hyp.as_level_set(n);
  Eigen::VectorXd df = field_gradient(nd.ls.f, x);
  if (df.norm() < 1e-12)
    throw FinslerError(ErrorCode::critical_point, "level function is singular at the point");

  nd.sign = hyp.orientation == Orientation::anti_gradient ? -1.0 : 1.0;
  nd.inv = legendre_inverse(m, x, nd.sign * df);
  nd.normal = nd.inv.y / nd.inv.dual_norm;
  if (hyp.orientation == Orientation::auto_positive_last && nd.normal[n - 1] < 0.0) {
    LegendreInverse flipped = legendre_inverse(m, x, -df);
    Eigen::VectorXd cand = flipped.y / flipped.dual_norm;
    if (cand[n - 1] > 0.0) {
      nd.sign = -1.0;
      nd.inv = std::move(flipped);
      nd.normal = std::move(cand);
    }
  }
  return nd;
}

void require_on_surface(const LevelSetForm& ls, const Eigen::VectorXd& x) {
  double fv = field_value(ls.f, x);
  if (std::abs(fv - ls.value) > 1e-6 * (1.0 + std::abs(ls.value))) {
    std::ostringstream ctx;
    ctx.precision(15);
    ctx << "f(x) = " << fv << ", level = " << ls.value;
    throw FinslerError(ErrorCode::invalid_parameter, "point is not on the hypersurface",
                       ctx.str());
  }
}

// Newton walk along df back onto {f = value}.
Eigen::VectorXd project_to_level(const LevelSetForm& ls, Eigen::VectorXd x) {
  for (int it = 0; it < 50; ++it) {
    double fv = field_value(ls.f, x);
    if (std::abs(fv - ls.value) <= 1e-12 * (1.0 + std::abs(ls.value))) return x;
    Eigen::VectorXd df = field_gradient(ls.f, x);
    double dn2 = df.squaredNorm();
    if (dn2 < 1e-16)
      throw FinslerError(ErrorCode::critical_point, "level projection hit a critical point");
    x += (ls.value - fv) / dn2 * df;
  }
  throw FinslerError(ErrorCode::convergence_failure, "level-set projection did not converge");
}

// g-orthonormalizes basis in place; optionally records the combination
// matrix C with new_a = sum_b C(a,b) old_b. Returns false on degeneracy.
bool gram_schmidt(const Eigen::MatrixXd& g, std::vector<Eigen::VectorXd>& basis,
                  Eigen::MatrixXd* combo) {
  const int k = static_cast<int>(basis.size());
  if (combo) *combo = Eigen::MatrixXd::Identity(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < a; ++b) {
      double proj = basis[b].dot(g * basis[a]);
      basis[a] -= proj * basis[b];
      if (combo) combo->row(a) -= proj * combo->row(b);
    }
    double norm2 = basis[a].dot(g * basis[a]);
    if (!(norm2 > 1e-20)) return false;
    double inv = 1.0 / std::sqrt(norm2);
    basis[a] *= inv;
    if (combo) combo->row(a) *= inv;
  }
  return true;
}

// Eigen-decomposition step shared by the direct and stencil routes: fills
// principal curvatures and the mean-curvature pair from the frame matrix.
void finish_report(const MetricSpec& m, const Eigen::VectorXd& x, ShapeReport& rep) {
  Eigen::MatrixXd at = rep.A.transpose();
  rep.symmetry_defect = (rep.A - at).cwiseAbs().maxCoeff();
  rep.A = 0.5 * (rep.A + at);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.A);
  rep.principal = es.eigenvalues();
  rep.H_aniso = rep.A.trace();
  rep.S_normal = s_curvature(m, x, rep.normal);
  rep.H_mu = rep.H_aniso + rep.S_normal;
}

}  // namespace

HypersurfaceSpec HypersurfaceSpec::level_set(ScalarField f, double value, Orientation o) {
  HypersurfaceSpec h;
  h.kind = Kind::level_set;
  h.f = std::move(f);
  h.value = value;
  h.orientation = o;
  return h;
}

HypersurfaceSpec HypersurfaceSpec::graph(ScalarField height, Orientation o) {
  HypersurfaceSpec h;
  h.kind = Kind::graph;
  h.f = std::move(height);
  h.orientation = o;
  return h;
}

LevelSetForm HypersurfaceSpec::as_level_set(int n) const {
  if (kind == Kind::level_set) {
    if (f.min_dimension() > n)
      throw FinslerError(ErrorCode::invalid_parameter,
                         "level function uses more coordinates than the metric has");
    return {f, value};
  }
  if (f.min_dimension() > n - 1)
    throw FinslerError(ErrorCode::invalid_parameter,
                       "graph height must use only the first n-1 coordinates");
  return {ScalarField::coordinate(n - 1) - f, 0.0};
}

Eigen::VectorXd unit_normal(const MetricSpec& m, const HypersurfaceSpec& hyp,
                            const Eigen::VectorXd& x) {
  return normal_data(m, hyp, x).normal;
}

ShapeReport shape_operator(const MetricSpec& m, const HypersurfaceSpec& hyp,
                           const Eigen::VectorXd& x) {
  const int n = m.dim();
  NormalData nd = normal_data(m, hyp, x);
  require_on_surface(nd.ls, x);

  // Jacobian of the unit-normal field n(x) = y(x)/c(x) with y = L^{-1}(s df)
  // and c = F(x, y(x)).
  Eigen::MatrixXd jy = gradient_field_jacobian(m, nd.ls.f, x, nd.inv.y, nd.sign);
  double c = nd.inv.dual_norm;

  Eigen::VectorXd f_x(n);
  {
    using D1 = Dual<double>;
    std::vector<D1> xs(n), ys(n);
    for (int i = 0; i < n; ++i) ys[i] = D1(nd.inv.y[i], 0.0);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) xs[i] = D1(x[i], i == j ? 1.0 : 0.0);
      f_x[j] = eval_F<D1>(m, xs, ys).d;
    }
  }
  // dc_j = F_{x^j} + F_{y^i} dy^i/dx^j with F_{y^i} = L_i / F = s df_i / c
  Eigen::VectorXd df = nd.sign * field_gradient(nd.ls.f, x);
  Eigen::VectorXd dc = f_x + jy.transpose() * (df / c);
  Eigen::MatrixXd jn = jy / c - (nd.normal / c) * dc.transpose();

  SprayData sp = spray(m, x, nd.normal);
  Eigen::MatrixXd deriv = jn + sp.N;  // column j: D^n_{e_j} n

  // tangent basis of ker(df), g_n-orthonormalized
  int pivot = 0;
  df.cwiseAbs().maxCoeff(&pivot);
  std::vector<Eigen::VectorXd> frame;
  for (int i = 0; i < n; ++i) {
    if (i == pivot) continue;
    Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
    t[i] = 1.0;
    t[pivot] = -df[i] / df[pivot];
    frame.push_back(t);
  }
  Eigen::MatrixXd g = fundamental_tensor(m, x, nd.normal).g;
  if (!gram_schmidt(g, frame, nullptr))
    throw FinslerError(ErrorCode::critical_point, "tangent frame is degenerate");

  ShapeReport rep;
  rep.normal = nd.normal;
  rep.tangent_frame = frame;
  rep.A.resize(n - 1, n - 1);
  for (int a = 0; a < n - 1; ++a)
    for (int b = 0; b < n - 1; ++b)
      rep.A(a, b) = -frame[a].dot(g * (deriv * frame[b]));
  finish_report(m, x, rep);
  return rep;
}

namespace {

// Everything flowing out of one seed: the central geodesic plus the
// 2(n-1)-leg stencil used to rebuild tangent frames of the parallel sets.
struct SeedFlow {
  ShapeReport base;
  GeodesicTrajectory center;
  std::vector<GeodesicTrajectory> plus, minus;  // one per tangent direction
};

SeedFlow flow_seed(const MetricSpec& m, const HypersurfaceSpec& hyp,
                   const Eigen::VectorXd& seed, double t_max, double fd_step) {
  SeedFlow sf;
  sf.base = shape_operator(m, hyp, seed);
  double T = std::max(t_max, fd_step);
  sf.center = integrate_geodesic(m, seed, sf.base.normal, T);

  const int n = m.dim();
  LevelSetForm ls = hyp.as_level_set(n);
  for (int a = 0; a < n - 1; ++a) {
    for (double sgn : {1.0, -1.0}) {
      Eigen::VectorXd xs = project_to_level(ls, seed + sgn * fd_step * sf.base.tangent_frame[a]);
      Eigen::VectorXd ns = unit_normal(m, hyp, xs);
      auto traj = integrate_geodesic(m, xs, ns, T);
      (sgn > 0 ? sf.plus : sf.minus).push_back(std::move(traj));
    }
  }
  return sf;
}

ShapeReport stencil_shape(const MetricSpec& m, const SeedFlow& sf, double t, double fd_step) {
  const int n = m.dim();
  Eigen::VectorXd x = sf.center.position(t);
  Eigen::VectorXd nrm = sf.center.velocity(t);
  nrm /= eval_F(m, x, nrm);  // renormalize integrator drift away

  SprayData sp = spray(m, x, nrm);
  Eigen::MatrixXd g = fundamental_tensor(m, x, nrm).g;

  std::vector<Eigen::VectorXd> tang(n - 1), dnorm(n - 1);
  for (int a = 0; a < n - 1; ++a) {
    tang[a] = (sf.plus[a].position(t) - sf.minus[a].position(t)) / (2.0 * fd_step);
    dnorm[a] = (sf.plus[a].velocity(t) - sf.minus[a].velocity(t)) / (2.0 * fd_step);
  }

  // D^n_{tau_a} n from the stencil; the flow direction itself contributes
  // nothing (normal geodesics are auto-parallel), so the frame may be
  // projected g-orthogonal to n without touching the derivatives.
  std::vector<Eigen::VectorXd> dcov(n - 1);
  for (int a = 0; a < n - 1; ++a) {
    dcov[a] = dnorm[a] + sp.N * tang[a];
    tang[a] -= nrm.dot(g * tang[a]) * nrm;
  }

  Eigen::MatrixXd combo;
  std::vector<Eigen::VectorXd> frame = tang;
  if (!gram_schmidt(g, frame, &combo)) {
    std::ostringstream ctx;
    ctx << "t = " << t;
    throw FinslerError(ErrorCode::focal_point, "parallel frame degenerated", ctx.str());
  }

  ShapeReport rep;
  rep.normal = nrm;
  rep.tangent_frame = frame;
  rep.A.resize(n - 1, n - 1);
  for (int a = 0; a < n - 1; ++a) {
    for (int b = 0; b < n - 1; ++b) {
      Eigen::VectorXd db = Eigen::VectorXd::Zero(n);
      for (int c = 0; c < n - 1; ++c) db += combo(b, c) * dcov[c];
      rep.A(a, b) = -frame[a].dot(g * db);
    }
  }
  finish_report(m, x, rep);
  return rep;
}

double relative_spread(std::vector<double> vals, double denom_floor) {
  auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  double spread = *hi - *lo;
  std::sort(vals.begin(), vals.end());
  size_t k = vals.size() / 2;
  double med = vals.size() % 2 ? vals[k] : 0.5 * (vals[k - 1] + vals[k]);
  return spread / std::max(std::abs(med), denom_floor);
}

}  // namespace

ParallelFlowReport parallel_flow(const MetricSpec& m, const HypersurfaceSpec& hyp,
                                 const std::vector<Eigen::VectorXd>& seeds,
                                 const std::vector<double>& t_grid, double fd_step) {
  if (seeds.empty())
    throw FinslerError(ErrorCode::invalid_parameter, "parallel flow needs at least one seed");
  if (t_grid.empty())
    throw FinslerError(ErrorCode::invalid_parameter, "empty t grid");
  for (size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0)
      throw FinslerError(ErrorCode::invalid_parameter, "flow times must be nonnegative");
    if (i > 0 && t_grid[i] <= t_grid[i - 1])
      throw FinslerError(ErrorCode::invalid_parameter, "t grid must be strictly increasing");
  }
  if (!(fd_step > 0.0))
    throw FinslerError(ErrorCode::invalid_parameter, "fd_step must be positive");

  const int s_count = static_cast<int>(seeds.size());
  std::vector<SeedFlow> flows(s_count);
  parallel_for(s_count, [&](int s) {
    flows[s] = flow_seed(m, hyp, seeds[s], t_grid.back(), fd_step);
  });

  ParallelFlowReport rep;
  rep.t_grid = t_grid;
  rep.fd_step = fd_step;
  rep.rows.resize(t_grid.size());
  rep.points.resize(t_grid.size());
  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    rep.rows[ti].resize(s_count);
    rep.points[ti].resize(s_count);
  }

  parallel_for(s_count, [&](int s) {
    for (size_t ti = 0; ti < t_grid.size(); ++ti) {
      double t = t_grid[ti];
      // t = 0 keeps the direct shape-operator result, same code path as a
      // standalone call.
      rep.rows[ti][s] = t == 0.0 ? flows[s].base : stencil_shape(m, flows[s], t, fd_step);
      rep.points[ti][s] = t == 0.0 ? seeds[s] : flows[s].center.position(t);
    }
  });

  const double kDenomFloor = 1e-2;
  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    std::vector<double> ha, hm;
    for (const ShapeReport& r : rep.rows[ti]) {
      ha.push_back(r.H_aniso);
      hm.push_back(r.H_mu);
    }
    rep.spread_H_aniso.push_back(relative_spread(ha, kDenomFloor));
    rep.spread_H_mu.push_back(relative_spread(hm, kDenomFloor));
  }

  rep.trace_checks.resize(s_count);
  parallel_for(s_count, [&](int s) {
    const ShapeReport& base = flows[s].base;
    double h_fd = stencil_shape(m, flows[s], fd_step, fd_step).H_aniso;
    double fd = (h_fd - base.H_aniso) / fd_step;
    double predicted = riemann_ricci_flag(m, seeds[s], base.normal).ric +
                       base.principal.squaredNorm();
    double rel = std::abs(fd - predicted) / std::max(std::abs(predicted), 1e-12);
    rep.trace_checks[s] = {s, fd, predicted, rel};
  });
  return rep;
}

SurfaceVerdict isoparametric_verdict(const MetricSpec& m, const HypersurfaceSpec& hyp,
                                     const Box& region, double t_max, int samples,
                                     double rel_tol, double abs_tol, double fd_step) {
  const int n = m.dim();
  if (region.lo.size() != n || region.hi.size() != n)
    throw FinslerError(ErrorCode::invalid_parameter, "region dimension mismatch");
  if (samples < 2)
    throw FinslerError(ErrorCode::invalid_parameter, "need at least two seeds");
  if (!(t_max > 0.0))
    throw FinslerError(ErrorCode::invalid_parameter, "t_max must be positive");

  LevelSetForm ls = hyp.as_level_set(n);
  std::mt19937_64 rng(0xA11CEULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::VectorXd> seeds;
  for (int attempt = 0; attempt < 50 * samples && static_cast<int>(seeds.size()) < samples;
       ++attempt) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
      x[i] = region.lo[i] + (region.hi[i] - region.lo[i]) * unif(rng);
    try {
      x = project_to_level(ls, x);
    } catch (const FinslerError&) {
      continue;
    }
    bool inside = true;
    for (int i = 0; i < n; ++i)
      if (x[i] < region.lo[i] || x[i] > region.hi[i]) inside = false;
    if (inside) seeds.push_back(std::move(x));
  }
  if (static_cast<int>(seeds.size()) < samples)
    throw FinslerError(ErrorCode::insufficient_samples,
                       "could not place enough seeds on the hypersurface in the region");

  const int kLevels = 6;
  std::vector<double> grid;
  for (int k = 0; k < kLevels; ++k) grid.push_back(t_max * k / (kLevels - 1));

  SurfaceVerdict verdict;
  verdict.evidence = parallel_flow(m, hyp, seeds, grid, fd_step);

  const double denom_floor = abs_tol / rel_tol;
  for (const auto& row : verdict.evidence.rows) {
    std::vector<double> ha, hm;
    for (const ShapeReport& r : row) {
      ha.push_back(r.H_aniso);
      hm.push_back(r.H_mu);
    }
    verdict.max_spread_H_aniso =
        std::max(verdict.max_spread_H_aniso, relative_spread(ha, denom_floor));
    verdict.max_spread_H_mu =
        std::max(verdict.max_spread_H_mu, relative_spread(hm, denom_floor));
  }
  verdict.is_isoparametric = verdict.max_spread_H_aniso < rel_tol;
  verdict.is_dmu_isoparametric = verdict.max_spread_H_mu < rel_tol;
  return verdict;
}

}  // namespace finsler
