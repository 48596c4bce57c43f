#include "finsler/spray.hpp"

#include <cmath>

namespace finsler {

namespace {

using D1 = Dual<double>;
using D2 = Dual<Dual<double>>;

std::vector<double> lift(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

SprayData spray(const MetricSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_point(m, x, y);
  const int n = m.dim();
  SprayData out;
  out.n = n;
  std::vector<double> xs = lift(x), ys = lift(y);

  out.G = from_std(spray_vector<double>(m, xs, ys));

  out.N.resize(n, n);
  std::vector<D1> xd(n), yd(n);
  for (int i = 0; i < n; ++i) xd[i] = D1(xs[i]);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) yd[k] = D1(ys[k], k == j ? 1.0 : 0.0);
    auto Gj = spray_vector<D1>(m, xd, yd);
    for (int i = 0; i < n; ++i) out.N(i, j) = Gj[i].d;
  }

  out.gamma_b.assign(static_cast<size_t>(n) * n * n, 0.0);
  std::vector<D2> xdd(n), ydd(n);
  for (int i = 0; i < n; ++i) xdd[i] = D2(xs[i]);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      for (int t = 0; t < n; ++t)
        ydd[t] = D2(D1(ys[t], t == k ? 1.0 : 0.0), D1(t == j ? 1.0 : 0.0, 0.0));
      auto Gjk = spray_vector<D2>(m, xdd, ydd);
      for (int i = 0; i < n; ++i) {
        double v = Gjk[i].d.d;
        out.gamma_b[(static_cast<size_t>(i) * n + j) * n + k] = v;
        out.gamma_b[(static_cast<size_t>(i) * n + k) * n + j] = v;
      }
    }
  }
  return out;
}

Eigen::MatrixXd riemann_matrix(const MetricSpec& m, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) {
  check_point(m, x, y);
  const int n = m.dim();
  std::vector<double> xs = lift(x), ys = lift(y);

  Eigen::VectorXd G0 = from_std(spray_vector<double>(m, xs, ys));

  Eigen::MatrixXd N(n, n);
  {
    std::vector<D1> xd(n), yd(n);
    for (int i = 0; i < n; ++i) xd[i] = D1(xs[i]);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) yd[k] = D1(ys[k], k == j ? 1.0 : 0.0);
      auto Gj = spray_vector<D1>(m, xd, yd);
      for (int i = 0; i < n; ++i) N(i, j) = Gj[i].d;
    }
  }

  Eigen::MatrixXd R(n, n);
  for (int k = 0; k < n; ++k) {
    // 2 dG/dx^k
    Eigen::VectorXd t1(n);
    {
      std::vector<D1> xd(n), yd(n);
      for (int i = 0; i < n; ++i) {
        xd[i] = D1(xs[i], i == k ? 1.0 : 0.0);
        yd[i] = D1(ys[i]);
      }
      auto G = spray_vector<D1>(m, xd, yd);
      for (int i = 0; i < n; ++i) t1[i] = G[i].d;
    }
    // y^j d2G/dx^j dy^k: outer x-direction = value of y, inner y-direction e_k
    Eigen::VectorXd t2(n);
    {
      std::vector<D2> xd(n), yd(n);
      for (int i = 0; i < n; ++i) {
        xd[i] = D2(D1(xs[i], 0.0), D1(ys[i], 0.0));
        yd[i] = D2(D1(ys[i], i == k ? 1.0 : 0.0), D1(0.0, 0.0));
      }
      auto G = spray_vector<D2>(m, xd, yd);
      for (int i = 0; i < n; ++i) t2[i] = G[i].d.d;
    }
    // G^j d2G/dy^j dy^k: outer y-direction = spray value, inner e_k
    Eigen::VectorXd t3(n);
    {
      std::vector<D2> xd(n), yd(n);
      for (int i = 0; i < n; ++i) {
        xd[i] = D2(xs[i]);
        yd[i] = D2(D1(ys[i], i == k ? 1.0 : 0.0), D1(G0[i], 0.0));
      }
      auto G = spray_vector<D2>(m, xd, yd);
      for (int i = 0; i < n; ++i) t3[i] = G[i].d.d;
    }
    for (int i = 0; i < n; ++i) {
      double nn = 0.0;
      for (int j = 0; j < n; ++j) nn += N(i, j) * N(j, k);
      R(i, k) = 2.0 * t1[i] - t2[i] + 2.0 * t3[i] - nn;
    }
  }
  return R;
}

CurvatureReport riemann_ricci_flag(const MetricSpec& m, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& y,
                                   const std::vector<Eigen::VectorXd>& flag_dirs) {
  CurvatureReport rep;
  rep.R = riemann_matrix(m, x, y);
  rep.ric = rep.R.trace();

  if (!flag_dirs.empty()) {
    FundamentalTensor ft = fundamental_tensor(m, x, y);
    const double F2v = eval_F(m, x, y) * eval_F(m, x, y);
    for (const auto& u : flag_dirs) {
      if (u.size() != x.size())
        throw FinslerError(ErrorCode::invalid_parameter, "flag direction has wrong dimension");
      const double guu = u.dot(ft.g * u);
      const double gyu = y.dot(ft.g * u);
      const double denom = F2v * guu - gyu * gyu;
      if (!(denom > 1e-12 * F2v * guu))
        throw FinslerError(ErrorCode::degenerate_flag, "flag direction is parallel to y");
      FlagValue fv;
      fv.u = u;
      fv.K = u.dot(ft.g * (rep.R * u)) / denom;
      rep.flags.push_back(fv);
    }
  }
  return rep;
}

ConformalData conformal_data(const MetricSpec& conformal, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y) {
  const auto* cs = conformal.as_conformal();
  if (cs == nullptr)
    throw FinslerError(ErrorCode::invalid_parameter, "conformal_data requires a conformal metric");
  check_point(conformal, x, y);

  ConformalData out;
  out.rho_x = field_gradient(cs->rho, x);
  out.theta = out.rho_x.dot(y);

  FundamentalTensor base_g = fundamental_tensor(*cs->inner, x, y);
  out.rho_up = base_g.g_inv * out.rho_x;
  out.drho_norm2 = out.rho_x.dot(out.rho_up);

  // Xi = theta^2 - theta_{x^k} y^k with theta(x,y) = rho_k(x) y^k
  Eigen::MatrixXd rho_xx = field_hessian(cs->rho, x);
  out.xi = out.theta * out.theta - y.dot(rho_xx * y);
  return out;
}

SprayData conformal_spray(const MetricSpec& base, const ScalarField& rho,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                          double check_tol) {
  MetricSpec scaled = conformal_scale(base, rho);
  SprayData direct = spray(scaled, x, y);

  ConformalData cd = conformal_data(scaled, x, y);
  const double F = eval_F(base, x, y);
  Eigen::VectorXd base_G = from_std(spray_vector<double>(
      base, std::vector<double>(x.data(), x.data() + x.size()),
      std::vector<double>(y.data(), y.data() + y.size())));
  Eigen::VectorXd general = base_G + cd.theta * y - 0.5 * F * F * cd.rho_up;

  const double scale = 1.0 + general.norm();
  if ((general - direct.G).norm() > check_tol * scale)
    throw FinslerError(ErrorCode::specialization_mismatch,
                       "conformal spray law disagrees with direct AD spray");

  // Component closed forms for the constant-wind Randers family over a
  // Euclidean background (wind along the last axis, rho independent of it).
  const auto* rn = base.as_randers();
  if (rn != nullptr && rn->h.euclidean() && !rn->wind.depends_on_x() &&
      rho.min_dimension() < base.dim()) {
    const int n = base.dim();
    std::vector<double> xs(x.data(), x.data() + x.size());
    Eigen::VectorXd w = from_std(rn->wind.eval<double>(xs));
    bool last_axis_only = true;
    for (int i = 0; i + 1 < n; ++i)
      if (w[i] != 0.0) last_axis_only = false;
    if (last_axis_only) {
      const double b = w[n - 1];
      const double lam = 1.0 - b * b;
      double a2 = 0.0;
      for (int i = 0; i + 1 < n; ++i) a2 += y[i] * y[i] / lam;
      a2 += y[n - 1] * y[n - 1] / (lam * lam);
      const double alpha = std::sqrt(a2);
      const double beta = -(b / lam) * y[n - 1];
      const double b2ab = b * b * alpha + beta;
      double theta = 0.0;
      for (int i = 0; i + 1 < n; ++i) theta += cd.rho_x[i] * y[i];

      Eigen::VectorXd special(n);
      const double common = (1.0 - b2ab / (2.0 * F)) * theta;
      for (int a = 0; a + 1 < n; ++a)
        special[a] = common * y[a] - 0.5 * lam * alpha * F * cd.rho_x[a];
      special[n - 1] = common * y[n - 1] - 0.5 * b * lam * alpha * theta;

      if ((special - direct.G).norm() > check_tol * scale)
        throw FinslerError(ErrorCode::specialization_mismatch,
                           "family closed-form spray disagrees with direct AD spray");
    }
  }
  return direct;
}

double conformal_flat_normal_ricci(int n, double b, const Eigen::VectorXd& x) {
  if (x.size() != n)
    throw FinslerError(ErrorCode::invalid_parameter, "point dimension mismatch");
  if (!(b >= 0.0 && b < 1.0))
    throw FinslerError(ErrorCode::invalid_parameter, "wind strength must lie in [0, 1)");
  const double pi = M_PI;
  double rho = 0.0;
  for (int a = 0; a + 1 < n; ++a) rho += std::log(2.0 + std::cos(pi * x[a]));

  // At the unit normal, g^{ab} = (1+b) delta^{ab}; raising rho_a just scales.
  double s = 0.0;
  for (int a = 0; a + 1 < n; ++a) {
    const double c = std::cos(pi * x[a]);
    const double rho_a = -pi * std::sin(pi * x[a]) / (2.0 + c);
    const double rho_up = (1.0 + b) * rho_a;
    s += (pi * pi + 2.0 * pi * pi * c) / ((2.0 + c) * (2.0 + c));
    s -= (n - 2) * rho_a * rho_a;
    s -= rho_up * rho_up * 0.5 * (n + 1) * b / ((1.0 + b) * (1.0 + b));
  }
  return std::exp(-2.0 * rho) * (1.0 + b) * s;
}

}  // namespace finsler
