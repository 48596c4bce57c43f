#include "finsler/reference_example.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "finsler/density.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/spray.hpp"

namespace finsler {
namespace {

constexpr double kPi = std::numbers::pi;

ScalarField reference_rho(int n) {
  std::vector<ScalarField> terms;
  for (int a = 0; a + 1 < n; ++a) {
    ScalarField angle = ScalarField::constant(kPi) * ScalarField::coordinate(a);
    terms.push_back(ScalarField::log(ScalarField::constant(2.0) + ScalarField::cos(angle)));
  }
  return ScalarField::sum(std::move(terms));
}

}  // namespace

ReferenceInstance build_reference_metric(int n, double b, double x0n) {
  if (n < 2) throw FinslerError(ErrorCode::invalid_parameter, "dimension must be at least 2");
  if (!(b >= 0.0 && b < 1.0))
    throw FinslerError(ErrorCode::invalid_parameter, "wind speed must lie in [0, 1)");

  ReferenceInstance inst;
  inst.n = n;
  inst.b = b;
  inst.x0n = x0n;
  inst.rho = reference_rho(n);

  Eigen::VectorXd wind = Eigen::VectorXd::Zero(n);
  wind[n - 1] = b;
  MetricSpec base = navigate(euclidean_background(n), constant_vector(wind));
  inst.metric = conformal_scale(std::move(base), inst.rho);
  inst.plane = HypersurfaceSpec::level_set(ScalarField::coordinate(n - 1), x0n);
  return inst;
}

Eigen::VectorXd lattice_point(const ReferenceInstance& inst, const std::vector<int>& m_coords) {
  if (static_cast<int>(m_coords.size()) != inst.n - 1)
    throw FinslerError(ErrorCode::invalid_parameter, "need n-1 lattice coordinates");
  Eigen::VectorXd x(inst.n);
  for (int a = 0; a + 1 < inst.n; ++a) x[a] = m_coords[a];
  x[inst.n - 1] = inst.x0n;
  return x;
}

Eigen::VectorXd reference_u1(const ReferenceInstance& inst) {
  return lattice_point(inst, std::vector<int>(inst.n - 1, 0));
}

Eigen::VectorXd reference_u2(const ReferenceInstance& inst) {
  return lattice_point(inst, std::vector<int>(inst.n - 1, 1));
}

ClaimReport verify_reference_claims(const ReferenceInstance& inst) {
  const int n = inst.n;
  ClaimReport report;

  auto run_claim = [&](const std::string& name, double expected, double tolerance,
                       const std::string& note, auto&& body) {
    Claim c;
    c.name = name;
    c.expected = expected;
    c.tolerance = tolerance;
    c.note = note;
    try {
      c.computed = body();
      c.pass = std::abs(c.computed - c.expected) <= c.tolerance;
    } catch (const FinslerError& e) {
      c.pass = false;
      c.note = note + " — aborted: " + e.what();
    }
    report.claims.push_back(std::move(c));
  };

  // fixed sample set on the plane, lattice-free points included
  std::vector<Eigen::VectorXd> plane_points;
  {
    std::mt19937_64 rng(0x0c1a14ULL);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Eigen::VectorXd marked(n);
    for (int a = 0; a + 1 < n; ++a) marked[a] = a % 2 == 0 ? 0.3 : 0.7;
    marked[n - 1] = inst.x0n;
    plane_points.push_back(marked);
    while (plane_points.size() < 20) {
      Eigen::VectorXd x(n);
      for (int a = 0; a + 1 < n; ++a) x[a] = unif(rng);
      x[n - 1] = inst.x0n;
      plane_points.push_back(std::move(x));
    }
  }

  // 1. lattice geodesics run straight up the wind axis at speed (1+b)e^{-rho}
  run_claim("lattice_geodesic", 0.0, 1e-8,
            "max deviation from the straight lattice trajectory over [0,1]", [&]() {
              double worst = 0.0;
              for (const auto& u : {reference_u1(inst), reference_u2(inst)}) {
                Eigen::VectorXd nrm = unit_normal(inst.metric, inst.plane, u);
                GeodesicTrajectory traj = integrate_geodesic(inst.metric, u, nrm, 1.0);
                double rho_u = field_value(inst.rho, u);
                double slope = (1.0 + inst.b) * std::exp(-rho_u);
                Eigen::VectorXd end = traj.position(1.0);
                for (int a = 0; a + 1 < n; ++a) worst = std::max(worst, std::abs(end[a] - u[a]));
                worst = std::max(worst, std::abs(end[n - 1] - u[n - 1] - slope));
              }
              return worst;
            });

  // 2. the plane's shape operator vanishes everywhere, not just on the lattice
  run_claim("shape_operator_zero", 0.0, 1e-8,
            "max |principal curvature| over 20 plane points", [&]() {
              double worst = 0.0;
              for (const auto& x : plane_points) {
                ShapeReport sr = shape_operator(inst.metric, inst.plane, x);
                worst = std::max(worst, sr.principal.cwiseAbs().maxCoeff());
              }
              return worst;
            });

  // 3/4. Ricci endpoints along the normal at the two lattice classes
  const double ric_u1_expected =
      std::pow(3.0, 1.0 - 2.0 * n) * (1.0 + inst.b) * kPi * kPi * (n - 1.0);
  const double ric_u2_expected = -(1.0 + inst.b) * kPi * kPi * (n - 1.0);

  auto ricci_at = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd nrm = unit_normal(inst.metric, inst.plane, u);
    double ad = riemann_ricci_flag(inst.metric, u, nrm).ric;
    double closed = conformal_flat_normal_ricci(n, inst.b, u);
    if (std::abs(ad - closed) > 1e-9 * std::max(1.0, std::abs(closed)))
      throw FinslerError(ErrorCode::method_mismatch,
                         "curvature routes disagree at a lattice point");
    return ad;
  };
  run_claim("ricci_u1", ric_u1_expected, 1e-6 * std::abs(ric_u1_expected),
            "normal Ricci curvature at the all-even lattice point (positive)",
            [&]() { return ricci_at(reference_u1(inst)); });
  run_claim("ricci_u2", ric_u2_expected, 1e-6 * std::abs(ric_u2_expected),
            "normal Ricci curvature at the all-odd lattice point (negative)",
            [&]() { return ricci_at(reference_u2(inst)); });

  // 5. S-curvature vanishes in the normal direction over the whole plane
  run_claim("s_curvature_normal_zero", 0.0, 1e-8,
            "max |S(x, normal)| over 20 plane points", [&]() {
              double worst = 0.0;
              for (const auto& x : plane_points) {
                Eigen::VectorXd nrm = unit_normal(inst.metric, inst.plane, x);
                worst = std::max(worst, std::abs(s_curvature(inst.metric, x, nrm)));
              }
              return worst;
            });

  // 6. mean curvature of the parallel set at t = 0.1 differs across the
  // two lattice flow lines by more than 0.5
  {
    Claim c;
    c.name = "parallel_mean_curvature_nonconstant";
    c.expected = 0.5;
    c.tolerance = 0.0;
    c.note = "absolute spread of H_aniso on the t=0.1 parallel set; must exceed expected";
    try {
      ParallelFlowReport flow =
          parallel_flow(inst.metric, inst.plane, {reference_u1(inst), reference_u2(inst)},
                        {0.0, 0.1}, 1e-3);
      double h1 = flow.rows[1][0].H_aniso;
      double h2 = flow.rows[1][1].H_aniso;
      c.computed = std::abs(h1 - h2);
      c.pass = c.computed > c.expected;
    } catch (const FinslerError& e) {
      c.pass = false;
      c.note += std::string(" — aborted: ") + e.what();
    }
    report.claims.push_back(std::move(c));
  }

  // 7. the plane is neither isoparametric nor dmu-isoparametric
  {
    Claim c;
    c.name = "not_isoparametric";
    c.expected = 0.0;
    c.tolerance = 0.5;
    c.note = "1 if either isoparametric flavor came back true";
    try {
      Box region;
      region.lo = Eigen::VectorXd::Constant(n, -2.0);
      region.hi = Eigen::VectorXd::Constant(n, 2.0);
      region.lo[n - 1] = inst.x0n - 0.5;
      region.hi[n - 1] = inst.x0n + 0.5;
      SurfaceVerdict verdict =
          isoparametric_verdict(inst.metric, inst.plane, region, 0.5, 16);
      c.computed = verdict.is_isoparametric || verdict.is_dmu_isoparametric ? 1.0 : 0.0;
      c.pass = c.computed < 0.5;
    } catch (const FinslerError& e) {
      c.pass = false;
      c.note += std::string(" — aborted: ") + e.what();
    }
    report.claims.push_back(std::move(c));
  }

  report.overall = true;
  for (const Claim& c : report.claims) report.overall = report.overall && c.pass;
  return report;
}

}  // namespace finsler
