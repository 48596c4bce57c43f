#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/errors.hpp"

namespace finsler {

// Closed-form scalar field over coordinates x^0..x^{n-1}. The node set is
// deliberately small: enough for conformal factors, level functions and
// metric coefficients, each exactly differentiable to any order via duals.
class ScalarField {
 public:
  enum class Op { constant, coord, add, mul, sin_, cos_, exp_, log_, pow_ };

  struct Node {
    Op op = Op::constant;
    double num = 0.0;       // constant value / pow exponent
    int index = 0;          // coordinate index
    std::vector<std::shared_ptr<const Node>> kids;
  };

  ScalarField() : root_(make(Op::constant)) {}

  static ScalarField constant(double v) {
    auto n = make(Op::constant);
    n->num = v;
    return ScalarField(std::move(n));
  }
  static ScalarField coordinate(int index) {
    if (index < 0) throw FinslerError(ErrorCode::invalid_parameter, "negative coordinate index");
    auto n = make(Op::coord);
    n->index = index;
    return ScalarField(std::move(n));
  }
  static ScalarField sum(std::vector<ScalarField> terms) { return nary(Op::add, std::move(terms)); }
  static ScalarField product(std::vector<ScalarField> factors) { return nary(Op::mul, std::move(factors)); }
  static ScalarField sin(ScalarField u) { return unary(Op::sin_, std::move(u)); }
  static ScalarField cos(ScalarField u) { return unary(Op::cos_, std::move(u)); }
  static ScalarField exp(ScalarField u) { return unary(Op::exp_, std::move(u)); }
  static ScalarField log(ScalarField u) { return unary(Op::log_, std::move(u)); }
  static ScalarField pow(ScalarField base, double exponent) {
    auto n = make(Op::pow_);
    n->num = exponent;
    n->kids.push_back(base.root_);
    return ScalarField(std::move(n));
  }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return sum({a, b});
  }
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    return product({a, b});
  }
  friend ScalarField operator-(const ScalarField& a) { return constant(-1.0) * a; }
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b) { return a + (-b); }

  template <class S>
  S eval(std::span<const S> x) const;

  bool depends_on_x() const { return depends(*root_); }
  // Smallest dimension this field is defined over (1 + max coordinate index).
  int min_dimension() const { return min_dim(*root_); }

  const Node& root() const { return *root_; }

 private:
  explicit ScalarField(std::shared_ptr<const Node> r) : root_(std::move(r)) {}

  static std::shared_ptr<Node> make(Op op) {
    auto n = std::make_shared<Node>();
    n->op = op;
    return n;
  }
  static ScalarField unary(Op op, ScalarField u) {
    auto n = make(op);
    n->kids.push_back(u.root_);
    return ScalarField(std::move(n));
  }
  static ScalarField nary(Op op, std::vector<ScalarField> args) {
    if (args.empty())
      throw FinslerError(ErrorCode::invalid_parameter, "empty argument list in field expression");
    auto n = make(op);
    for (auto& a : args) n->kids.push_back(a.root_);
    return ScalarField(std::move(n));
  }

  static bool depends(const Node& n) {
    if (n.op == Op::coord) return true;
    for (const auto& k : n.kids)
      if (depends(*k)) return true;
    return false;
  }
  static int min_dim(const Node& n) {
    int d = n.op == Op::coord ? n.index + 1 : 0;
    for (const auto& k : n.kids) d = std::max(d, min_dim(*k));
    return d;
  }

  std::shared_ptr<const Node> root_;
};

namespace detail {

// Lives outside the class so the math names resolve to the scalar overloads
// (the class's own builder statics would otherwise shadow them).
template <class S>
S eval_field_node(const ScalarField::Node& n, std::span<const S> x) {
  using Op = ScalarField::Op;
  switch (n.op) {
    case Op::constant:
      return S(n.num);
    case Op::coord:
      if (n.index >= static_cast<int>(x.size()))
        throw FinslerError(ErrorCode::invalid_parameter, "coordinate index out of range");
      return x[n.index];
    case Op::add: {
      S acc = eval_field_node<S>(*n.kids[0], x);
      for (size_t k = 1; k < n.kids.size(); ++k) acc = acc + eval_field_node<S>(*n.kids[k], x);
      return acc;
    }
    case Op::mul: {
      S acc = eval_field_node<S>(*n.kids[0], x);
      for (size_t k = 1; k < n.kids.size(); ++k) acc = acc * eval_field_node<S>(*n.kids[k], x);
      return acc;
    }
    case Op::sin_:
      return sin(eval_field_node<S>(*n.kids[0], x));
    case Op::cos_:
      return cos(eval_field_node<S>(*n.kids[0], x));
    case Op::exp_:
      return exp(eval_field_node<S>(*n.kids[0], x));
    case Op::log_: {
      S u = eval_field_node<S>(*n.kids[0], x);
      if (!(value(u) > 0.0))
        throw FinslerError(ErrorCode::domain_error, "log of a non-positive value");
      return log(u);
    }
    case Op::pow_: {
      S u = eval_field_node<S>(*n.kids[0], x);
      double p = n.num;
      if (value(u) < 0.0 && p != std::floor(p))
        throw FinslerError(ErrorCode::domain_error, "fractional power of a negative value");
      if (value(u) == 0.0 && p < 0.0)
        throw FinslerError(ErrorCode::domain_error, "negative power of zero");
      return pow(u, p);
    }
  }
  throw FinslerError(ErrorCode::invalid_parameter, "corrupt field expression");
}

}  // namespace detail

template <class S>
S ScalarField::eval(std::span<const S> x) const {
  return detail::eval_field_node<S>(*root_, x);
}

// Vector field as one scalar field per component.
struct VectorField {
  std::vector<ScalarField> comps;

  int dim() const { return static_cast<int>(comps.size()); }
  bool depends_on_x() const {
    for (const auto& c : comps)
      if (c.depends_on_x()) return true;
    return false;
  }
  template <class S>
  std::vector<S> eval(std::span<const S> x) const {
    std::vector<S> out;
    out.reserve(comps.size());
    for (const auto& c : comps) out.push_back(c.eval(x));
    return out;
  }
};

inline VectorField constant_vector(const Eigen::VectorXd& v) {
  VectorField f;
  for (Eigen::Index i = 0; i < v.size(); ++i) f.comps.push_back(ScalarField::constant(v[i]));
  return f;
}

// --- exact field calculus (dual-based) ------------------------------------

inline double field_value(const ScalarField& f, const Eigen::VectorXd& x) {
  std::vector<double> xs(x.data(), x.data() + x.size());
  return f.eval<double>(xs);
}

inline Eigen::VectorXd field_gradient(const ScalarField& f, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n);
  std::vector<Dual<double>> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = Dual<double>(x[i]);
  for (int i = 0; i < n; ++i) {
    xs[i].d = 1.0;
    g[i] = f.eval<Dual<double>>(xs).d;
    xs[i].d = 0.0;
  }
  return g;
}

inline Eigen::MatrixXd field_hessian(const ScalarField& f, const Eigen::VectorXd& x) {
  using D2 = Dual<Dual<double>>;
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<D2> xs(n);
      for (int k = 0; k < n; ++k)
        xs[k] = D2(Dual<double>(x[k], k == j ? 1.0 : 0.0), Dual<double>(k == i ? 1.0 : 0.0, 0.0));
      h(i, j) = h(j, i) = f.eval<D2>(xs).d.d;
    }
  }
  return h;
}

}  // namespace finsler
