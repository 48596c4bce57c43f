#pragma once

#include <Eigen/Dense>
#include <vector>

#include "finsler/geodesics.hpp"
#include "finsler/metric.hpp"

namespace finsler {

// Co-orientation of the unit normal. auto_positive_last picks the sign of
// df that makes the normal's last component positive (falls back to the
// gradient side when that component vanishes).
enum class Orientation { auto_positive_last, gradient, anti_gradient };

struct LevelSetForm {
  ScalarField f;
  double value = 0.0;
};

struct HypersurfaceSpec {
  enum class Kind { level_set, graph };
  Kind kind = Kind::level_set;
  ScalarField f;       // defining function (level_set) or height (graph)
  double value = 0.0;  // level_set only
  Orientation orientation = Orientation::auto_positive_last;

  static HypersurfaceSpec level_set(ScalarField f, double value,
                                    Orientation o = Orientation::auto_positive_last);
  // Graph x^n = height(x^1..x^{n-1}), stored as the level set of
  // x^n - height at value 0.
  static HypersurfaceSpec graph(ScalarField height,
                                Orientation o = Orientation::auto_positive_last);

  LevelSetForm as_level_set(int n) const;
};

// The F-unit normal for the requested orientation: L^{-1}(s df)/F*.
Eigen::VectorXd unit_normal(const MetricSpec& m, const HypersurfaceSpec& hyp,
                            const Eigen::VectorXd& x);

struct ShapeReport {
  Eigen::VectorXd normal;                     // F(normal) = 1
  std::vector<Eigen::VectorXd> tangent_frame; // g_n-orthonormal e_a
  Eigen::MatrixXd A;                          // Weingarten matrix in the frame
  Eigen::VectorXd principal;                  // eigenvalues, ascending
  double H_aniso = 0.0;                       // sum of principal curvatures
  double S_normal = 0.0;                      // S-curvature at (x, normal)
  double H_mu = 0.0;                          // H_aniso + S_normal
  double symmetry_defect = 0.0;               // max |A - A^T| before symmetrizing
};

// Weingarten map A_n X = -D^n_X n of the level set through x: the normal
// field is differentiated along tangent directions with reference vector n,
// then expressed in a g_n-orthonormal tangent frame.
ShapeReport shape_operator(const MetricSpec& m, const HypersurfaceSpec& hyp,
                           const Eigen::VectorXd& x);

struct TraceCheck {
  int seed_id = 0;
  double fd = 0.0;         // (H_aniso(fd_step) - H_aniso(0)) / fd_step
  double predicted = 0.0;  // ric(x, normal) + sum of mu_a(0)^2
  double rel_err = 0.0;
};

struct ParallelFlowReport {
  std::vector<double> t_grid;
  std::vector<std::vector<ShapeReport>> rows;       // [t][seed]
  std::vector<std::vector<Eigen::VectorXd>> points; // flowed positions
  std::vector<double> spread_H_aniso;               // per-t relative spread
  std::vector<double> spread_H_mu;
  std::vector<TraceCheck> trace_checks;             // per seed, at t = 0
  double fd_step = 0.0;
};

// Flows each seed along its unit normal geodesic; tangent frames of the
// parallel set M_t come from central differences across a stencil of
// neighboring normal geodesics seeded at x0 +- fd_step * e_a.
ParallelFlowReport parallel_flow(const MetricSpec& m, const HypersurfaceSpec& hyp,
                                 const std::vector<Eigen::VectorXd>& seeds,
                                 const std::vector<double>& t_grid,
                                 double fd_step = 1e-4);

struct SurfaceVerdict {
  bool is_isoparametric = false;      // H_aniso constant on every M_t
  bool is_dmu_isoparametric = false;  // H_mu constant on every M_t
  double max_spread_H_aniso = 0.0;
  double max_spread_H_mu = 0.0;
  ParallelFlowReport evidence;
};

// Samples seeds on the hypersurface inside the region, flows them over
// [0, t_max], and decides constancy of both mean-curvature flavors per t
// (rel_tol relative spread; abs_tol floor when the level mean is near 0).
SurfaceVerdict isoparametric_verdict(const MetricSpec& m, const HypersurfaceSpec& hyp,
                                     const Box& region, double t_max = 0.5,
                                     int samples = 24, double rel_tol = 1e-6,
                                     double abs_tol = 1e-8, double fd_step = 1e-4);

}  // namespace finsler
