#pragma once

#include <Eigen/Dense>
#include <vector>

#include "finsler/density.hpp"
#include "finsler/metric.hpp"
#include "finsler/ode.hpp"

namespace finsler {

struct GeodesicTrajectory {
  std::vector<double> t_samples;
  std::vector<Eigen::VectorXd> x_samples;
  std::vector<Eigen::VectorXd> v_samples;
  std::vector<double> F_along;
  OdeSolution solution;  // dense output over (x, v)

  Eigen::VectorXd position(double t) const;
  Eigen::VectorXd velocity(double t) const;
  double max_F_drift() const;
};

// Solves xdd = -2 G(x, xd) adaptively from (x0, y0) over [0, T].
GeodesicTrajectory integrate_geodesic(const MetricSpec& m, const Eigen::VectorXd& x0,
                                      const Eigen::VectorXd& y0, double T,
                                      double tol = 1e-10);

// d/dx^j of the Legendre image L(x, y)_i at fixed y.
Eigen::MatrixXd legendre_x_jacobian(const MetricSpec& m, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y);

// Jacobian of the gradient field x -> L^{-1}(sign * df(x)), obtained by
// implicit differentiation: g_y dy/dx = sign * Hess f - dL/dx|_y.
Eigen::MatrixXd gradient_field_jacobian(const MetricSpec& m, const ScalarField& f,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                        double sign);

struct FieldAnalysis {
  Eigen::VectorXd grad;      // Legendre inverse of df
  double F_of_grad = 0.0;    // dual norm of df
  double lap_sigma = 0.0;    // divergence Laplacian w.r.t. sigma_BH
  double lap_grad = 0.0;     // nonlinear Laplacian, trace w.r.t. g_{grad f}
};

FieldAnalysis field_analysis(const MetricSpec& m, const ScalarField& f,
                             const Eigen::VectorXd& x);

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

struct IsoparametricVerdict {
  double transnormal_spread = 0.0;  // worst per-level relative spread of F(grad f)
  double laplacian_spread = 0.0;    // same for lap_sigma
  bool is_transnormal = false;
  bool is_isoparametric = false;
  std::vector<double> level_t;  // bucket centers (median of f)
  std::vector<double> a_table;  // median F(grad f) per bucket
  std::vector<double> b_table;  // median lap_sigma per bucket
  int buckets_used = 0;
  int samples_used = 0;
};

// Samples the region, buckets by f-value into 64 levels, and tests whether
// F(grad f) and the Laplacian are functions of f alone (spread thresholds:
// rel_tol relative, abs_tol when the level value is near zero).
IsoparametricVerdict isoparametric_function_check(const MetricSpec& m, const ScalarField& f,
                                                  const Box& region, int samples = 4096,
                                                  double rel_tol = 1e-6,
                                                  double abs_tol = 1e-8);

}  // namespace finsler
