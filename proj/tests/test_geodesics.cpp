// Geodesic integration, gradient fields, and the isoparametric-function test.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "finsler/geodesics.hpp"
#include "finsler/reference_example.hpp"
#include "finsler/tensor.hpp"
#include "test_support.hpp"

using namespace finsler;
using testsup::Rng;

TEST_CASE("geodesics: Minkowski trajectories are straight lines") {
  Rng rng(0x9e0d0001);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 2 + rng.pick(3);
    MetricSpec m = testsup::constant_wind_metric(rng, n);
    Eigen::VectorXd x0 = testsup::random_point(rng, n);
    Eigen::VectorXd y0 = testsup::random_flag(rng, n);
    GeodesicTrajectory tr = integrate_geodesic(m, x0, y0, 1.0, 1e-12);
    CHECK((tr.x_samples.back() - (x0 + y0)).norm() < 1e-10);
    CHECK((tr.v_samples.back() - y0).norm() < 1e-10);
    CHECK(tr.max_F_drift() < 1e-12);
    // dense output stays on the line too
    double tm = rng.uniform(0.0, 1.0);
    CHECK((tr.position(tm) - (x0 + tm * y0)).norm() < 1e-9);
  }
}

TEST_CASE("geodesics: F is conserved along random-zoo trajectories") {
  Rng rng(0x9e0d0002);
  for (int rep = 0; rep < 100; ++rep) {
    int n = 2 + rng.pick(2);
    MetricSpec m = testsup::random_metric(rng, n);
    Eigen::VectorXd x0 = testsup::random_point(rng, n);
    Eigen::VectorXd y0 = testsup::random_flag(rng, n);
    GeodesicTrajectory tr = integrate_geodesic(m, x0, y0, 0.3, 1e-10);
    CHECK(tr.max_F_drift() < 1e-8 * std::max(1.0, tr.F_along.front()));
  }
}

TEST_CASE("geodesics: vertical lines through lattice points, with pinned speeds") {
  ReferenceInstance inst = build_reference_metric();
  Eigen::VectorXd u1 = reference_u1(inst);
  Eigen::VectorXd u2 = reference_u2(inst);

  // unit normal at an all-even lattice point: e^{-rho} (1 + b) e_n = (1/6) e_n
  Eigen::VectorXd n1 = unit_normal(inst.metric, inst.plane, u1);
  CHECK(std::abs(n1[2] - 1.0 / 6.0) < 1e-12);
  GeodesicTrajectory t1 = integrate_geodesic(inst.metric, u1, n1, 1.0, 1e-12);
  Eigen::VectorXd expect1 = u1;
  expect1[2] += 1.0 / 6.0;
  CHECK((t1.x_samples.back() - expect1).norm() < 1e-8);
  CHECK(t1.max_F_drift() < 1e-8);

  // all-odd lattice point: rho = 0 there, so the speed is 1 + b = 1.5
  Eigen::VectorXd n2 = unit_normal(inst.metric, inst.plane, u2);
  CHECK(std::abs(n2[2] - 1.5) < 1e-12);
  GeodesicTrajectory t2 = integrate_geodesic(inst.metric, u2, n2, 1.0, 1e-12);
  Eigen::VectorXd expect2 = u2;
  expect2[2] += 1.5;
  CHECK((t2.x_samples.back() - expect2).norm() < 1e-8);
  CHECK(t2.max_F_drift() < 1e-8);

  // the whole path is vertical: x^1, x^2 frozen
  for (const auto& x : t1.x_samples) {
    CHECK(std::abs(x[0] - u1[0]) < 1e-10);
    CHECK(std::abs(x[1] - u1[1]) < 1e-10);
  }
}

TEST_CASE("geodesics: metric symmetries map geodesics to geodesics") {
  ReferenceInstance inst = build_reference_metric();
  Rng rng(0x9e0d0003);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd x0 = testsup::random_point(rng, 3);
    Eigen::VectorXd y0 = testsup::random_flag(rng, 3);
    GeodesicTrajectory base = integrate_geodesic(inst.metric, x0, y0, 0.4, 1e-11);

    // period-2 translation in a tangential coordinate
    int a = rng.pick(2);
    Eigen::VectorXd xs = x0;
    xs[a] += 2.0;
    GeodesicTrajectory shifted = integrate_geodesic(inst.metric, xs, y0, 0.4, 1e-11);
    Eigen::VectorXd back = shifted.x_samples.back();
    back[a] -= 2.0;
    CHECK((back - base.x_samples.back()).norm() < 1e-8);

    // reflection x^a -> -x^a together with y^a -> -y^a
    Eigen::VectorXd xr = x0, yr = y0;
    xr[a] = -xr[a];
    yr[a] = -yr[a];
    GeodesicTrajectory refl = integrate_geodesic(inst.metric, xr, yr, 0.4, 1e-11);
    Eigen::VectorXd mirrored = refl.x_samples.back();
    mirrored[a] = -mirrored[a];
    CHECK((mirrored - base.x_samples.back()).norm() < 1e-8);
  }
}

TEST_CASE("gradient field jacobian matches central differences") {
  Rng rng(0x9e0d0004);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 2 + rng.pick(2);
    MetricSpec m = testsup::random_metric(rng, n);
    ScalarField f = ScalarField::coordinate(rng.pick(n)) + testsup::bounded_field(rng, n, 0.0, 0.3);
    Eigen::VectorXd x = testsup::random_point(rng, n);

    Eigen::VectorXd df = field_gradient(f, x);
    if (df.norm() < 0.2) continue;  // keep well away from critical points
    LegendreInverse inv = legendre_inverse(m, x, df);
    Eigen::MatrixXd jac = gradient_field_jacobian(m, f, x, inv.y, 1.0);

    const double h = 1e-6;
    Eigen::MatrixXd fd(n, n);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      Eigen::VectorXd yp = legendre_inverse(m, xp, field_gradient(f, xp)).y;
      Eigen::VectorXd ym = legendre_inverse(m, xm, field_gradient(f, xm)).y;
      fd.col(j) = (yp - ym) / (2.0 * h);
    }
    CHECK((jac - fd).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, jac.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("field analysis: flat pinned examples") {
  MetricSpec eu = euclidean_metric(3);

  // linear height function: unit gradient, both Laplacians zero
  ScalarField fn = ScalarField::coordinate(2);
  Eigen::VectorXd x(3);
  x << 0.4, -0.2, 0.9;
  FieldAnalysis lin = field_analysis(eu, fn, x);
  CHECK((lin.grad - Eigen::Vector3d(0, 0, 1)).norm() < 1e-12);
  CHECK(lin.F_of_grad == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(lin.lap_sigma) < 1e-10);
  CHECK(std::abs(lin.lap_grad) < 1e-10);

  // squared radius: F(grad) = 2 sqrt(f), Laplacian = 2n
  ScalarField r2 = ScalarField::coordinate(0) * ScalarField::coordinate(0) +
                   ScalarField::coordinate(1) * ScalarField::coordinate(1) +
                   ScalarField::coordinate(2) * ScalarField::coordinate(2);
  Eigen::VectorXd p(3);
  p << 0.8, 0.5, -1.1;
  FieldAnalysis sq = field_analysis(eu, r2, p);
  CHECK((sq.grad - 2.0 * p).norm() < 1e-10);
  CHECK(sq.F_of_grad == doctest::Approx(2.0 * p.norm()).epsilon(1e-10));
  CHECK(sq.lap_sigma == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(sq.lap_grad == doctest::Approx(6.0).epsilon(1e-8));

  // critical point is rejected
  CHECK_THROWS_AS(field_analysis(eu, r2, Eigen::VectorXd::Zero(3)), FinslerError);
}

TEST_CASE("isoparametric check: Euclidean squared radius passes with known tables") {
  MetricSpec eu = euclidean_metric(3);
  ScalarField r2 = ScalarField::coordinate(0) * ScalarField::coordinate(0) +
                   ScalarField::coordinate(1) * ScalarField::coordinate(1) +
                   ScalarField::coordinate(2) * ScalarField::coordinate(2);
  Box region;
  region.lo = Eigen::Vector3d(0.5, 0.5, 0.5);
  region.hi = Eigen::Vector3d(1.5, 1.5, 1.5);
  IsoparametricVerdict v = isoparametric_function_check(eu, r2, region, 4096, 1e-6, 1e-8);
  CHECK(v.is_transnormal);
  CHECK(v.is_isoparametric);
  REQUIRE(v.buckets_used >= 8);
  for (int i = 0; i < v.buckets_used; ++i) {
    CHECK(std::abs(v.a_table[i] - 2.0 * std::sqrt(v.level_t[i])) < 1e-8);
    CHECK(std::abs(v.b_table[i] - 6.0) < 1e-7);
  }
}

TEST_CASE("isoparametric check: height function under a constant wind") {
  Rng rng(0x9e0d0005);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(3);
  w[2] = 0.5;
  MetricSpec mk = navigate(euclidean_background(3), constant_vector(w));
  ScalarField f = ScalarField::coordinate(2);
  Box region;
  region.lo = Eigen::Vector3d(-1, -1, -1);
  region.hi = Eigen::Vector3d(1, 1, 1);
  IsoparametricVerdict v = isoparametric_function_check(mk, f, region);
  CHECK(v.is_transnormal);
  CHECK(v.is_isoparametric);
  CHECK(v.transnormal_spread < 1e-9);
  for (int i = 0; i < v.buckets_used; ++i) {
    CHECK(std::abs(v.a_table[i] - 1.5) < 1e-9);  // dual norm of dx^n is 1 + b
    CHECK(std::abs(v.b_table[i]) < 1e-9);
  }
}

TEST_CASE("isoparametric check: the reference plane family fails transnormality") {
  ReferenceInstance inst = build_reference_metric();
  ScalarField f = ScalarField::coordinate(2);
  Box region;
  region.lo = Eigen::Vector3d(-1, -1, -1);
  region.hi = Eigen::Vector3d(1, 1, 1);
  IsoparametricVerdict v = isoparametric_function_check(inst.metric, f, region);
  CHECK_FALSE(v.is_transnormal);
  CHECK_FALSE(v.is_isoparametric);
  CHECK(v.transnormal_spread > 0.5);  // order-one variation along each plane
}

TEST_CASE("isoparametric check: input validation") {
  MetricSpec eu = euclidean_metric(2);
  ScalarField f = ScalarField::coordinate(0);
  Box region;
  region.lo = Eigen::Vector2d(0, 0);
  region.hi = Eigen::Vector2d(1, 1);
  CHECK_THROWS_AS(isoparametric_function_check(eu, f, region, 32), FinslerError);
  Box flipped;
  flipped.lo = Eigen::Vector2d(1, 1);
  flipped.hi = Eigen::Vector2d(0, 0);
  CHECK_THROWS_AS(isoparametric_function_check(eu, f, flipped), FinslerError);
  // constant f has no level structure
  CHECK_THROWS_AS(isoparametric_function_check(eu, ScalarField::constant(3.0), region),
                  FinslerError);
}
