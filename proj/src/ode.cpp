#include "finsler/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler {
namespace {

// Dormand-Prince 5(4) tableau. The last stage is FSAL: k7 evaluated at the
// candidate point doubles as the first stage of the next step.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

Eigen::VectorXd OdeSolution::at(double t) const {
  const auto& ss = samples;
  if (ss.empty()) return {};
  if (t <= ss.front().t) return ss.front().state;
  if (t >= ss.back().t) return ss.back().state;
  // bracketing accepted step
  size_t hi = 1;
  while (ss[hi].t < t) ++hi;
  const OdeSample& a = ss[hi - 1];
  const OdeSample& b = ss[hi];
  double h = b.t - a.t;
  double s = (t - a.t) / h;
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  double h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s);
  double h11 = s * s * (s - 1);
  return h00 * a.state + h10 * h * a.deriv + h01 * b.state + h11 * h * b.deriv;
}

OdeSolution integrate_ode(const OdeRhs& f, const Eigen::VectorXd& y0, double t0, double t1,
                          double tol) {
  if (!(t1 > t0))
    throw FinslerError(ErrorCode::invalid_parameter, "integration requires t1 > t0");
  if (!(tol > 0))
    throw FinslerError(ErrorCode::invalid_parameter, "integrator tolerance must be positive");

  OdeSolution sol;
  double t = t0;
  Eigen::VectorXd y = y0;
  Eigen::VectorXd k1 = f(t, y);
  sol.samples.push_back({t, y, k1});

  double h = 0.01 * (1.0 + y.norm()) / (1.0 + k1.norm());
  h = std::min(h, t1 - t0);

  const int n = static_cast<int>(y0.size());
  Eigen::VectorXd k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y5(n), err(n);

  while (t < t1) {
    h = std::min(h, t1 - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      std::ostringstream ctx;
      ctx << "t = " << t << ", h = " << h;
      throw FinslerError(ErrorCode::step_size_underflow,
                         "step size collapsed below machine resolution", ctx.str());
    }

    k2 = f(t + c2 * h, y + h * (a21 * k1));
    k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = f(t + h, y5);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
      double s = tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
      scale += (err[i] / s) * (err[i] / s);
    }
    double err_norm = std::sqrt(scale / n);

    if (err_norm <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
      sol.samples.push_back({t, y, k1});
    }
    double factor = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
  }
  return sol;
}

}  // namespace finsler
