// The bundled reference construction and its claim checker.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "finsler/reference_example.hpp"
#include "finsler/spray.hpp"
#include "test_support.hpp"

using namespace finsler;
using testsup::Rng;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_CASE("reference: conformal factor takes its pinned lattice values") {
  ReferenceInstance inst = build_reference_metric();
  CHECK(field_value(inst.rho, reference_u1(inst)) == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-14));
  CHECK(field_value(inst.rho, reference_u2(inst)) == doctest::Approx(0.0).scale(1).epsilon(1e-14));

  // mixed parity: one factor collapses to ln 1, the other to ln 3
  Eigen::VectorXd u = lattice_point(inst, {1, 2});
  CHECK(field_value(inst.rho, u) == doctest::Approx(std::log(3.0)).epsilon(1e-14));

  // the factor is flat across the lattice: all tangential derivatives vanish
  Rng rng(0xeaa90001);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd p = lattice_point(inst, {rng.pick(9) - 4, rng.pick(9) - 4});
    Eigen::VectorXd dr = field_gradient(inst.rho, p);
    CHECK(dr.cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("reference: norm values and the unit normal across the lattice") {
  ReferenceInstance inst = build_reference_metric();
  Eigen::VectorXd u1 = reference_u1(inst);
  Eigen::VectorXd y(3);
  y << 0.0, 0.0, 1.5;
  CHECK(eval_F(inst.metric, u1, y) == doctest::Approx(9.0).epsilon(1e-13));

  // normal speed (1+b) e^{-rho}: 1/6 at even, 3/2 at odd, 1/2 at mixed parity
  auto normal_speed = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd nrm = unit_normal(inst.metric, inst.plane, u);
    CHECK(std::abs(nrm[0]) < 1e-14);
    CHECK(std::abs(nrm[1]) < 1e-14);
    return nrm[2];
  };
  CHECK(normal_speed(u1) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK(normal_speed(reference_u2(inst)) == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(normal_speed(lattice_point(inst, {1, 2})) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("reference: b = 0 collapses to the conformally flat Riemannian norm") {
  ReferenceInstance inst = build_reference_metric(3, 0.0);
  Rng rng(0xeaa90002);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd x = testsup::random_point(rng, 3, 2.0);
    Eigen::VectorXd y = testsup::random_flag(rng, 3);
    double expect = std::exp(field_value(inst.rho, x)) * y.norm();
    CHECK(eval_F(inst.metric, x, y) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("reference: lattice point helpers and parameter validation") {
  ReferenceInstance inst = build_reference_metric(4, 0.3, -0.25);
  Eigen::VectorXd u = lattice_point(inst, {2, -1, 5});
  CHECK(u.size() == 4);
  CHECK(u[0] == 2.0);
  CHECK(u[1] == -1.0);
  CHECK(u[2] == 5.0);
  CHECK(u[3] == -0.25);
  CHECK(reference_u1(inst)[3] == -0.25);
  CHECK(reference_u2(inst)[0] == 1.0);

  CHECK_THROWS_AS(lattice_point(inst, {1, 2}), FinslerError);  // needs n-1 coords
  CHECK_THROWS_AS(build_reference_metric(1, 0.5), FinslerError);
  CHECK_THROWS_AS(build_reference_metric(3, 1.0), FinslerError);
  CHECK_THROWS_AS(build_reference_metric(3, -0.1), FinslerError);
}

TEST_CASE("reference: Ricci endpoints in the default instance") {
  ReferenceInstance inst = build_reference_metric();
  Eigen::VectorXd u1 = reference_u1(inst);
  Eigen::VectorXd u2 = reference_u2(inst);

  double r1 = conformal_flat_normal_ricci(3, 0.5, u1);
  double r2 = conformal_flat_normal_ricci(3, 0.5, u2);
  CHECK(r1 == doctest::Approx(kPi * kPi / 81.0).epsilon(1e-12));
  CHECK(r2 == doctest::Approx(-3.0 * kPi * kPi).epsilon(1e-12));

  // the AD route lands on the same numbers through the unit normal
  Eigen::VectorXd n1 = unit_normal(inst.metric, inst.plane, u1);
  Eigen::VectorXd n2 = unit_normal(inst.metric, inst.plane, u2);
  CHECK(riemann_ricci_flag(inst.metric, u1, n1).ric == doctest::Approx(r1).epsilon(1e-9));
  CHECK(riemann_ricci_flag(inst.metric, u2, n2).ric == doctest::Approx(r2).epsilon(1e-9));
}

TEST_CASE("reference: full claim run passes in the default configuration") {
  ReferenceInstance inst = build_reference_metric();
  ClaimReport report = verify_reference_claims(inst);
  REQUIRE(report.claims.size() == 7);
  for (const Claim& c : report.claims) {
    CAPTURE(c.name);
    CAPTURE(c.note);
    CAPTURE(c.computed);
    CHECK(c.pass);
  }
  CHECK(report.overall);

  // spot values carried by the report
  CHECK(report.claims[2].name == "ricci_u1");
  CHECK(report.claims[2].computed == doctest::Approx(kPi * kPi / 81.0).epsilon(1e-6));
  CHECK(report.claims[3].computed == doctest::Approx(-3.0 * kPi * kPi).epsilon(1e-6));
}

TEST_CASE("reference: claims hold for other parameters") {
  // Riemannian limit: the same plane is still not isoparametric
  ClaimReport riem = verify_reference_claims(build_reference_metric(3, 0.0));
  for (const Claim& c : riem.claims) {
    CAPTURE(c.name);
    CAPTURE(c.note);
    CHECK(c.pass);
  }
  CHECK(riem.overall);

  // one dimension up, expected endpoints rescale as 3^{1-2n} (1+b) pi^2 (n-1)
  ClaimReport four = verify_reference_claims(build_reference_metric(4, 0.5));
  for (const Claim& c : four.claims) {
    CAPTURE(c.name);
    CAPTURE(c.note);
    CHECK(c.pass);
  }
  CHECK(four.overall);
  CHECK(four.claims[2].computed ==
        doctest::Approx(std::pow(3.0, -7.0) * 1.5 * kPi * kPi * 3.0).epsilon(1e-6));
}
