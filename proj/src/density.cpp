#include "finsler/density.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>

#include "finsler/randers.hpp"
#include "finsler/spray.hpp"
#include "finsler/tensor.hpp"
#include "finsler/threads.hpp"

namespace finsler {
namespace {

constexpr double kPi = std::numbers::pi;

GaussLegendre compute_gauss_legendre(int order) {
  GaussLegendre rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  // Newton on P_order from the asymptotic root guess; symmetric pairs.
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double p_deriv = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      p_deriv = order * (t * p1 - p0) / (t * t - 1.0);
      double step = p1 / p_deriv;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    rule.nodes[i] = -t;
    rule.nodes[order - 1 - i] = t;
    double w = 2.0 / ((1.0 - t * t) * p_deriv * p_deriv);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

int default_polar_order(int n) {
  switch (n) {
    case 2: return 256;
    case 3: return 64;
    case 4: return 32;
    default: return 16;
  }
}

// Integral over S^{n-1} of F(x, theta)^{-n}. Product rule: Gauss-Legendre on
// the polar angles [0, pi], midpoint on the periodic azimuth [0, 2pi).
double indicatrix_volume_integral(const MetricSpec& m, const Eigen::VectorXd& x,
                                  int order) {
  const int n = m.dim();
  const std::vector<double> xs = to_std(x);

  auto radial = [&](const std::vector<double>& theta) {
    double f = eval_F<double>(m, xs, theta);
    return std::pow(f, -n);
  };

  if (n == 2) {
    const int mpts = 2 * order;
    std::vector<double> partial(mpts, 0.0);
    parallel_for(mpts, [&](int j) {
      double phi = 2.0 * kPi * (j + 0.5) / mpts;
      partial[j] = radial({std::cos(phi), std::sin(phi)});
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total * (2.0 * kPi / mpts);
  }

  const GaussLegendre& gl = gauss_legendre(order);
  const int mpts = 2 * order;  // azimuth
  const int polar_angles = n - 2;

  // Outer slot per first polar node keeps the reduction order fixed.
  std::vector<double> partial(order, 0.0);
  parallel_for(order, [&](int i0) {
    std::vector<int> idx(polar_angles, 0);
    idx[0] = i0;
    std::vector<double> theta(n);
    double acc = 0.0;
    for (;;) {
      // polar part of the direction and the sin^k surface factor
      double w = 1.0, sines = 1.0;
      double measure = 1.0;
      for (int k = 0; k < polar_angles; ++k) {
        double phi = 0.5 * kPi * (gl.nodes[idx[k]] + 1.0);
        w *= gl.weights[idx[k]] * 0.5 * kPi;
        measure *= std::pow(std::sin(phi), n - 2 - k);
        theta[k] = sines * std::cos(phi);
        sines *= std::sin(phi);
      }
      double inner = 0.0;
      for (int j = 0; j < mpts; ++j) {
        double phi = 2.0 * kPi * (j + 0.5) / mpts;
        theta[n - 2] = sines * std::cos(phi);
        theta[n - 1] = sines * std::sin(phi);
        inner += radial(theta);
      }
      acc += w * measure * inner * (2.0 * kPi / mpts);

      // advance the inner polar indices (idx[0] stays fixed)
      int k = polar_angles - 1;
      while (k >= 1) {
        if (++idx[k] < order) break;
        idx[k] = 0;
        --k;
      }
      if (k < 1) break;
    }
    partial[i0] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double sigma_at_order(const MetricSpec& m, const Eigen::VectorXd& x, int order) {
  const int n = m.dim();
  double body_vol = indicatrix_volume_integral(m, x, order) / n;
  return unit_ball_volume(n) / body_vol;
}

// Structural match for the paper_formula route: conformal scale over the
// constant-wind flat family, scale independent of the wind axis.
struct ConstantWindFamily {
  const ConformalScale* scale = nullptr;
  double b = 0.0;
};

std::optional<ConstantWindFamily> match_constant_wind_family(const MetricSpec& m) {
  const ConformalScale* cs = m.as_conformal();
  if (!cs) return std::nullopt;
  const RandersNavigation* rn = cs->inner->as_randers();
  if (!rn || !rn->h.entries.empty()) return std::nullopt;
  const int n = m.dim();
  if (rn->wind.depends_on_x()) return std::nullopt;
  std::vector<double> zero(n, 0.0);
  std::vector<double> v = rn->wind.eval<double>(zero);
  for (int a = 0; a + 1 < n; ++a)
    if (std::abs(v[a]) > 1e-14) return std::nullopt;
  if (cs->rho.min_dimension() >= n) return std::nullopt;  // must not see x^n
  return ConstantWindFamily{cs, v[n - 1]};
}

double s_generic(const MetricSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  SprayData sp = spray(m, x, y);
  double trace_n = sp.N.trace();
  return trace_n - y.dot(dlog_sigma_dx(m, x));
}

double s_conformal_shortcut(const MetricSpec& m, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y) {
  const ConformalScale* cs = m.as_conformal();
  const MetricSpec& base = *cs->inner;
  double s_base = s_generic(base, x, y);
  FundamentalTensor ft = fundamental_tensor(base, x, y);
  CartanTensor ct = cartan_tensor(base, x, y);
  Eigen::VectorXd rho_k = field_gradient(cs->rho, x);
  Eigen::VectorXd rho_up = ft.g_inv * rho_k;
  double f = eval_F(base, x, y);
  return s_base + f * f * rho_up.dot(ct.mean);
}

// Closed bracket form for the constant-wind family:
//   S~ = -1/2 rho_k [ (alpha_{y^i} beta - alpha b_i) alpha^{ik}
//                     - b^i y^k (alpha_{y^i}(beta - alpha) - 2 alpha b_i)/F
//                     + (n-1) y^k (b^2 alpha + beta)/F ]
double s_closed_bracket(const ConstantWindFamily& fam, int n, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y) {
  ClosedFormTensor cf = closed_form_tensor(fam.b, n, y);
  const AlphaBetaSplit& sp = cf.split;
  Eigen::VectorXd rho_k = field_gradient(fam.scale->rho, x);

  double mixed = 0.0;  // sum_i b^i (alpha_{y^i}(beta - alpha) - 2 alpha b_i)
  for (int i = 0; i < n; ++i)
    mixed += sp.b_upper[i] * (sp.alpha_y[i] * (sp.beta - sp.alpha) - 2.0 * sp.alpha * sp.b_lower[i]);
  double iso = (n - 1.0) * (sp.beta_norm2 * sp.alpha + sp.beta) / cf.F;

  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    double bracket = 0.0;
    for (int i = 0; i < n; ++i)
      bracket += (sp.alpha_y[i] * sp.beta - sp.alpha * sp.b_lower[i]) * sp.alpha_upper(i, k);
    bracket += y[k] * (iso - mixed / cf.F);
    total += rho_k[k] * bracket;
  }
  return -0.5 * total;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  if (order < 1)
    throw FinslerError(ErrorCode::invalid_parameter, "quadrature order must be positive");
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

DensityResult bh_density(const MetricSpec& m, const Eigen::VectorXd& x, int order,
                         double rel_tol) {
  const int n = m.dim();
  if (x.size() != n)
    throw FinslerError(ErrorCode::invalid_parameter, "point dimension mismatch");
  if (order == 0) {
    if (n > 5)
      throw FinslerError(ErrorCode::invalid_parameter,
                         "default quadrature budget covers dim <= 5; pass an explicit order");
    order = default_polar_order(n);
  }
  if (order < 2)
    throw FinslerError(ErrorCode::invalid_parameter, "quadrature order must be at least 2");

  double coarse = sigma_at_order(m, x, order);
  double fine = sigma_at_order(m, x, 2 * order);
  double est = std::abs(fine - coarse) / std::abs(fine);
  if (!(est <= rel_tol)) {
    std::ostringstream ctx;
    ctx << "order " << order << " -> " << 2 * order << ", est_rel_error " << est;
    throw FinslerError(ErrorCode::quadrature_not_converged,
                       "density quadrature did not reach the requested tolerance", ctx.str());
  }
  return DensityResult{fine, est, 2 * order};
}

Eigen::VectorXd dlog_sigma_dx(const MetricSpec& m, const Eigen::VectorXd& x) {
  const int n = m.dim();
  if (m.x_independent()) return Eigen::VectorXd::Zero(n);
  if (const ConformalScale* cs = m.as_conformal())
    return static_cast<double>(n) * field_gradient(cs->rho, x) + dlog_sigma_dx(*cs->inner, x);

  // No closed form: central differences of the quadrature density.
  const double h = 1e-5;
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    double sp = bh_density(m, xp).sigma;
    double sm = bh_density(m, xm).sigma;
    out[i] = (std::log(sp) - std::log(sm)) / (2.0 * h);
  }
  return out;
}

const char* s_method_name(SMethod method) {
  switch (method) {
    case SMethod::generic: return "generic";
    case SMethod::conformal_shortcut: return "conformal_shortcut";
    case SMethod::paper_formula: return "paper_formula";
  }
  return "generic";
}

double s_curvature(const MetricSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   SMethod method, double cross_tol) {
  check_point(m, x, y);
  const int n = m.dim();

  double generic = s_generic(m, x, y);
  std::optional<double> shortcut, bracket;
  if (m.as_conformal()) shortcut = s_conformal_shortcut(m, x, y);
  if (auto fam = match_constant_wind_family(m)) bracket = s_closed_bracket(*fam, n, x, y);

  double scale = 1.0 + std::abs(generic);
  auto check = [&](const std::optional<double>& other, const char* name) {
    if (other && std::abs(*other - generic) > cross_tol * scale) {
      std::ostringstream ctx;
      ctx.precision(15);
      ctx << "generic " << generic << " vs " << name << " " << *other;
      throw FinslerError(ErrorCode::method_mismatch, "S-curvature routes disagree", ctx.str());
    }
  };
  check(shortcut, "conformal_shortcut");
  check(bracket, "paper_formula");

  switch (method) {
    case SMethod::generic:
      return generic;
    case SMethod::conformal_shortcut:
      if (!shortcut)
        throw FinslerError(ErrorCode::invalid_parameter,
                           "conformal_shortcut requires a conformal-scale metric");
      return *shortcut;
    case SMethod::paper_formula:
      if (!bracket)
        throw FinslerError(
            ErrorCode::invalid_parameter,
            "paper_formula requires a conformal scale of the constant-wind flat family");
      return *bracket;
  }
  return generic;
}

}  // namespace finsler
