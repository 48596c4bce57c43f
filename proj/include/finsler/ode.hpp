#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace finsler {

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

struct OdeSample {
  double t = 0.0;
  Eigen::VectorXd state;
  Eigen::VectorXd deriv;
};

// Accepted-step trajectory with cubic Hermite dense output.
struct OdeSolution {
  std::vector<OdeSample> samples;

  const Eigen::VectorXd& final_state() const { return samples.back().state; }
  Eigen::VectorXd at(double t) const;
};

// Embedded Dormand-Prince 5(4), adaptive steps, forward in time.
// Local error is controlled against tol (absolute and relative alike).
OdeSolution integrate_ode(const OdeRhs& f, const Eigen::VectorXd& y0, double t0,
                          double t1, double tol = 1e-10);

}  // namespace finsler
