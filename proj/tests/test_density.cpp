// Busemann-Hausdorff density quadrature and the S-curvature routes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "finsler/density.hpp"
#include "finsler/reference_example.hpp"
#include "finsler/tensor.hpp"
#include "test_support.hpp"

using namespace finsler;
using testsup::Rng;

namespace {

// Independent density oracle for any navigation metric: the BH density of
// (h, v) equals sqrt(det h), wind or no wind (matrix determinant lemma
// applied to the alpha-beta data keeps the normalization at 1).
double sqrt_det_background(const RiemannianSpec& h, const Eigen::VectorXd& x) {
  std::vector<double> xs = to_std(x);
  SquareMat<double> hm = h.eval<double>(xs);
  return std::sqrt(to_eigen(hm).determinant());
}

}  // namespace

TEST_CASE("density: Euclidean is exactly 1 in dimensions 2..5") {
  for (int n = 2; n <= 5; ++n) {
    DensityResult r = bh_density(euclidean_metric(n), Eigen::VectorXd::Zero(n));
    CHECK(std::abs(r.sigma - 1.0) < 1e-6);
    CHECK(r.est_rel_error <= 1e-6);
  }
}

TEST_CASE("density: constant wind keeps sigma at 1 for every b") {
  Rng rng(0xde5c0001);
  const double bs[] = {0.1, 0.5, 0.9};
  for (double b : bs) {
    for (int n = 2; n <= 4; ++n) {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
      w[rng.pick(n)] = b;
      MetricSpec m = navigate(euclidean_background(n), constant_vector(w));
      DensityResult r = bh_density(m, testsup::random_point(rng, n));
      CHECK(std::abs(r.sigma - 1.0) < 2e-6);
    }
  }
}

TEST_CASE("density: navigation over a curved background gives sqrt(det h)") {
  Rng rng(0xde5c0002);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 2 + rng.pick(2);
    RiemannianSpec h = testsup::curved_background(rng, n);
    VectorField wind;
    int live = rng.pick(n);
    for (int i = 0; i < n; ++i)
      wind.comps.push_back(i == live ? testsup::bounded_field(rng, n, 0.0, 0.4)
                                     : ScalarField::constant(0.0));
    Eigen::VectorXd x = testsup::random_point(rng, n);
    double expect = sqrt_det_background(h, x);
    DensityResult r = bh_density(navigate(h, wind), x);
    CHECK(std::abs(r.sigma - expect) <= 3e-6 * expect);
  }
}

TEST_CASE("density: conformal scaling multiplies sigma by e^{n rho}") {
  ReferenceInstance inst = build_reference_metric();
  DensityResult at_u1 = bh_density(inst.metric, reference_u1(inst));
  CHECK(std::abs(at_u1.sigma - 729.0) <= 1e-4 * 729.0);

  DensityResult at_u2 = bh_density(inst.metric, reference_u2(inst));
  CHECK(std::abs(at_u2.sigma - 1.0) <= 1e-4);  // rho(u2) = 0
}

TEST_CASE("density: dimension guard and explicit quadrature orders") {
  CHECK_THROWS_AS(bh_density(euclidean_metric(6), Eigen::VectorXd::Zero(6)), FinslerError);

  // an explicit order still converges on a random SPD case
  Rng rng(0xde5c0003);
  MetricSpec m = testsup::constant_wind_metric(rng, 3);
  DensityResult r = bh_density(m, Eigen::VectorXd::Zero(3), 96);
  CHECK(std::abs(r.sigma - 1.0) < 1e-7);
  // the reported order is the refined one the error estimate was taken at
  CHECK(r.order >= 96);
}

TEST_CASE("log-density gradient: Minkowski zero, conformal shift, curved oracle") {
  Rng rng(0xde5c0004);

  MetricSpec mk = testsup::constant_wind_metric(rng, 3);
  CHECK(dlog_sigma_dx(mk, testsup::random_point(rng, 3)).norm() < 1e-14);

  // conformal over Minkowski: d ln sigma = n * grad rho exactly
  ScalarField rho = testsup::bounded_field(rng, 3, 0.0, 0.7);
  MetricSpec cm = conformal_scale(mk, rho);
  Eigen::VectorXd x = testsup::random_point(rng, 3);
  CHECK((dlog_sigma_dx(cm, x) - 3.0 * field_gradient(rho, x)).norm() < 1e-12);

  // curved background: d ln sigma = 1/2 tr(h^{-1} dh/dx_k), via exact field AD
  for (int rep = 0; rep < 10; ++rep) {
    int n = 2 + rng.pick(2);
    RiemannianSpec h = testsup::curved_background(rng, n);
    VectorField wind;
    for (int i = 0; i < n; ++i)
      wind.comps.push_back(i == 0 ? testsup::bounded_field(rng, n, 0.0, 0.3)
                                  : ScalarField::constant(0.0));
    MetricSpec m = navigate(h, wind);
    Eigen::VectorXd p = testsup::random_point(rng, n);

    std::vector<double> ps = to_std(p);
    Eigen::MatrixXd hm = to_eigen(h.eval<double>(ps));
    Eigen::MatrixXd hinv = hm.inverse();
    Eigen::VectorXd expect(n);
    for (int k = 0; k < n; ++k) {
      Eigen::MatrixXd dh(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dh(i, j) = field_gradient(h.entries[static_cast<size_t>(i) * n + j], p)[k];
      expect[k] = 0.5 * (hinv * dh).trace();
    }
    CHECK((dlog_sigma_dx(m, p) - expect).cwiseAbs().maxCoeff() < 5e-6);
  }
}

TEST_CASE("S-curvature: Minkowski zero and 1-homogeneity") {
  Rng rng(0xde5c0005);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 2 + rng.pick(3);
    MetricSpec mk = testsup::constant_wind_metric(rng, n);
    Eigen::VectorXd x = testsup::random_point(rng, n);
    Eigen::VectorXd y = testsup::random_flag(rng, n);
    CHECK(std::abs(s_curvature(mk, x, y)) < 1e-10);
  }

  for (int rep = 0; rep < 100; ++rep) {
    int n = 2 + rng.pick(2);
    MetricSpec m = testsup::random_metric(rng, n);
    Eigen::VectorXd x = testsup::random_point(rng, n);
    Eigen::VectorXd y = testsup::random_flag(rng, n);
    double s1 = s_curvature(m, x, y);
    double s2 = s_curvature(m, x, (2.0 * y).eval());
    CHECK(std::abs(s2 - 2.0 * s1) <= 1e-9 * std::max(1.0, std::abs(2.0 * s1)));
  }
}

TEST_CASE("S-curvature: the three routes agree on the reference family") {
  ReferenceInstance inst = build_reference_metric();
  Rng rng(0xde5c0006);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x = testsup::random_point(rng, 3, 2.0);
    Eigen::VectorXd y = testsup::random_flag(rng, 3);
    double generic = s_curvature(inst.metric, x, y, SMethod::generic);
    double shortcut = s_curvature(inst.metric, x, y, SMethod::conformal_shortcut);
    double closed = s_curvature(inst.metric, x, y, SMethod::paper_formula);
    double scale = std::max(1.0, std::abs(generic));
    CHECK(std::abs(generic - shortcut) <= 1e-6 * scale);
    CHECK(std::abs(generic - closed) <= 1e-6 * scale);
  }
}

TEST_CASE("S-curvature: normal direction of the reference plane gives zero") {
  ReferenceInstance inst = build_reference_metric();
  Rng rng(0xde5c0007);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x(3);
    x << rng.uniform(-2, 2), rng.uniform(-2, 2), inst.x0n;
    Eigen::VectorXd nrm = unit_normal(inst.metric, inst.plane, x);
    CHECK(std::abs(s_curvature(inst.metric, x, nrm)) < 1e-8);
  }
}

TEST_CASE("S-curvature: method applicability is enforced") {
  MetricSpec eu = euclidean_metric(3);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(s_curvature(eu, x, y, SMethod::conformal_shortcut), FinslerError);
  CHECK_THROWS_AS(s_curvature(eu, x, y, SMethod::paper_formula), FinslerError);

  CHECK(std::string(s_method_name(SMethod::generic)) == "generic");
  CHECK(std::string(s_method_name(SMethod::conformal_shortcut)) == "conformal_shortcut");
  CHECK(std::string(s_method_name(SMethod::paper_formula)) == "paper_formula");
}
