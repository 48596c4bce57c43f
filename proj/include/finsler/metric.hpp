#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "finsler/expr.hpp"
#include "finsler/linalg.hpp"

namespace finsler {

// Riemannian data used as the navigation background: either the Euclidean
// identity or a symmetric matrix of scalar fields (row-major, dim*dim).
struct RiemannianSpec {
  int dim = 0;
  std::vector<ScalarField> entries;  // empty => identity

  bool euclidean() const { return entries.empty(); }
  bool x_independent() const {
    for (const auto& e : entries)
      if (e.depends_on_x()) return false;
    return true;
  }

  template <class S>
  SquareMat<S> eval(std::span<const S> x) const {
    SquareMat<S> h(dim);
    if (euclidean()) {
      for (int i = 0; i < dim; ++i) h(i, i) = S(1.0);
      return h;
    }
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) h(i, j) = entries[static_cast<size_t>(i) * dim + j].eval(x);
    return h;
  }
};

inline RiemannianSpec euclidean_background(int dim) { return RiemannianSpec{dim, {}}; }

struct MetricSpec;

struct EuclideanBase {
  int dim = 0;
};

struct RandersNavigation {
  RiemannianSpec h;
  VectorField wind;
};

struct ConformalScale {
  std::shared_ptr<const MetricSpec> inner;
  ScalarField rho;
};

// Composable metric description: Euclidean norm, Zermelo navigation on a
// Riemannian background, or a conformal rescaling of another metric.
struct MetricSpec {
  std::variant<EuclideanBase, RandersNavigation, ConformalScale> node;

  int dim() const;
  bool x_independent() const;  // true => Minkowski (no x dependence anywhere)

  const RandersNavigation* as_randers() const { return std::get_if<RandersNavigation>(&node); }
  const ConformalScale* as_conformal() const { return std::get_if<ConformalScale>(&node); }
  const EuclideanBase* as_euclidean() const { return std::get_if<EuclideanBase>(&node); }
};

inline MetricSpec euclidean_metric(int dim) {
  if (dim < 2) throw FinslerError(ErrorCode::invalid_parameter, "dimension must be at least 2");
  return MetricSpec{EuclideanBase{dim}};
}

inline MetricSpec conformal_scale(MetricSpec inner, ScalarField rho) {
  if (rho.min_dimension() > inner.dim())
    throw FinslerError(ErrorCode::invalid_parameter, "conformal factor uses out-of-range coordinates");
  return MetricSpec{ConformalScale{std::make_shared<MetricSpec>(std::move(inner)), std::move(rho)}};
}

inline int MetricSpec::dim() const {
  if (auto* e = std::get_if<EuclideanBase>(&node)) return e->dim;
  if (auto* r = std::get_if<RandersNavigation>(&node)) return r->h.dim;
  return std::get<ConformalScale>(node).inner->dim();
}

inline bool MetricSpec::x_independent() const {
  if (std::holds_alternative<EuclideanBase>(node)) return true;
  if (auto* r = std::get_if<RandersNavigation>(&node))
    return r->h.x_independent() && !r->wind.depends_on_x();
  const auto& c = std::get<ConformalScale>(node);
  return !c.rho.depends_on_x() && c.inner->x_independent();
}

// F(x, y), templated over the scalar so nested duals deliver exact x- and
// y-derivatives of any order. Positively 1-homogeneous in y; y must be
// nonzero at the leaf-value level.
template <class S>
S eval_F(const MetricSpec& m, std::span<const S> x, std::span<const S> y) {
  if (auto* e = std::get_if<EuclideanBase>(&m.node)) {
    S q = S(0.0);
    for (int i = 0; i < e->dim; ++i) q = q + y[i] * y[i];
    return sqrt(q);
  }
  if (auto* r = std::get_if<RandersNavigation>(&m.node)) {
    const int n = r->h.dim;
    SquareMat<S> h = r->h.eval(x);
    std::vector<S> w = r->wind.eval(x);
    S h2 = S(0.0), v0 = S(0.0), b2 = S(0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        h2 = h2 + h(i, j) * y[i] * y[j];
        v0 = v0 + h(i, j) * w[i] * y[j];
        b2 = b2 + h(i, j) * w[i] * w[j];
      }
    }
    if (!(value(b2) < 1.0))
      throw FinslerError(ErrorCode::navigation_degenerate, "wind reaches unit speed (lambda <= 0)");
    S lam = 1.0 - b2;
    return (sqrt(lam * h2 + v0 * v0) - v0) / lam;
  }
  const auto& c = std::get<ConformalScale>(m.node);
  return exp(c.rho.eval(x)) * eval_F(*c.inner, x, y);
}

template <class S>
S eval_F2(const MetricSpec& m, std::span<const S> x, std::span<const S> y) {
  S f = eval_F(m, x, y);
  return f * f;
}

inline void check_point(const MetricSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != m.dim() || y.size() != m.dim())
    throw FinslerError(ErrorCode::invalid_parameter, "point dimension does not match metric");
  if (y.norm() == 0.0)
    throw FinslerError(ErrorCode::invalid_parameter, "flag vector y must be nonzero");
}

inline double eval_F(const MetricSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_point(m, x, y);
  std::vector<double> xs(x.data(), x.data() + x.size());
  std::vector<double> ys(y.data(), y.data() + y.size());
  return eval_F<double>(m, xs, ys);
}

}  // namespace finsler
