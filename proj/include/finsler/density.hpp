#pragma once

#include <Eigen/Dense>
#include <vector>

#include "finsler/metric.hpp"

namespace finsler {

// Gauss-Legendre rule on [-1, 1]; cached per order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

struct DensityResult {
  double sigma = 0.0;
  double est_rel_error = 0.0;  // order-doubling estimate
  int order = 0;               // polar order actually used
};

// Busemann-Hausdorff density: vol(unit ball) / vol{y : F(x,y) <= 1}, the
// body volume evaluated as a spherical integral of the radial function
// 1/F(x, theta). order = 0 selects a dimension-scaled default (dim <= 5).
DensityResult bh_density(const MetricSpec& m, const Eigen::VectorXd& x,
                         int order = 0, double rel_tol = 1e-6);

// Gradient of ln sigma_BH. Closed forms where the variant provides them
// (x-independent: zero; conformal scale: n * drho + inner); otherwise
// central differences of bh_density with step 1e-5.
Eigen::VectorXd dlog_sigma_dx(const MetricSpec& m, const Eigen::VectorXd& x);

enum class SMethod { generic, conformal_shortcut, paper_formula };
const char* s_method_name(SMethod method);

// S-curvature with respect to the Busemann-Hausdorff volume form. The
// generic route is trace of the nonlinear connection minus y . dln(sigma);
// conformal_shortcut uses the scaling law S~ = S + F^2 rho^k I_k (base
// metric quantities); paper_formula is the closed bracket expression for a
// conformal scale of the constant-wind flat family. Every route applicable
// to the metric is evaluated and compared: disagreement beyond cross_tol
// raises MethodMismatch.
double s_curvature(const MetricSpec& m, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y,
                   SMethod method = SMethod::generic,
                   double cross_tol = 1e-6);

}  // namespace finsler
