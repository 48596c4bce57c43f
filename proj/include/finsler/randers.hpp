#pragma once

#include <Eigen/Dense>

#include "finsler/metric.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

// Zermelo navigation constructor: the metric whose unit ball is the h-unit
// ball translated by the wind. Requires ||wind||_h < 1 wherever evaluated.
MetricSpec navigate(RiemannianSpec h, VectorField wind);

// alpha/beta decomposition of the constant-wind family over the Euclidean
// background (wind = b d/dx^n): F = alpha + beta with diagonal alpha.
struct AlphaBetaSplit {
  double alpha = 0.0;
  double beta = 0.0;
  Eigen::MatrixXd alpha_lower;  // alpha_ij
  Eigen::MatrixXd alpha_upper;  // alpha^ij
  Eigen::VectorXd b_lower;      // b_i
  Eigen::VectorXd b_upper;      // b^i
  double beta_norm2 = 0.0;      // ||beta||^2_alpha
  Eigen::VectorXd alpha_y;      // d alpha / d y^i
};

struct ClosedFormTensor {
  AlphaBetaSplit split;
  double F = 0.0;
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
};

// Component formulas for g and its inverse in the constant-wind family;
// written independently of the AD path so the two can check each other.
ClosedFormTensor closed_form_tensor(double b, int n, const Eigen::VectorXd& y);

struct HypersurfaceSpec;  // hypersurface.hpp

// Navigation correspondence at a hypersurface point: Finsler unit normal vs.
// Riemannian unit normal shifted by the wind, and the principal-curvature
// shift mu = mu_bar + k for isotropic S-curvature S = (n+1) k F.
struct NormalShiftReport {
  Eigen::VectorXd n_finsler;
  Eigen::VectorXd n_riemann;
  Eigen::VectorXd wind;
  Eigen::VectorXd mu_finsler;
  Eigen::VectorXd mu_riemann;
  double k = 0.0;                  // measured isotropy constant
  double normal_residual = 0.0;    // |n_finsler - (n_riemann + wind)|
  double mu_residual = 0.0;        // max |mu_fins - (mu_riem + k)|
};

NormalShiftReport normal_and_curvature_shift(const MetricSpec& randers_metric,
                                             const HypersurfaceSpec& hyp,
                                             const Eigen::VectorXd& x,
                                             double isotropy_tol = 1e-8);

}  // namespace finsler
