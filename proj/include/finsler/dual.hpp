#pragma once

#include <cmath>
#include <utility>

namespace finsler {

// Forward-mode dual scalar. Nesting (Dual<Dual<double>>, ...) yields exact
// higher-order mixed partials: each level carries one derivative direction.
// Code that branches on magnitudes must use value(), which drills to the leaf.
template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative along this level's seeded direction

  Dual() = default;
  Dual(double c) : v(c), d() {}  // constants lift with a zero derivative part
  Dual(T val, T der) : v(std::move(val)), d(std::move(der)) {}
};

inline double value(double x) { return x; }
template <class T>
double value(const Dual<T>& x) {
  return value(x.v);
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
Dual<T> operator+(const Dual<T>& a, double b) {
  return {a.v + b, a.d};
}
template <class T>
Dual<T> operator+(double a, const Dual<T>& b) {
  return {a + b.v, b.d};
}

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, double b) {
  return {a.v - b, a.d};
}
template <class T>
Dual<T> operator-(double a, const Dual<T>& b) {
  return {a - b.v, -b.d};
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double b) {
  return {a.v * b, a.d * b};
}
template <class T>
Dual<T> operator*(double a, const Dual<T>& b) {
  return {a * b.v, a * b.d};
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T inv_b = 1.0 / b.v;
  T q = a.v * inv_b;
  return {q, (a.d - q * b.d) * inv_b};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double b) {
  return {a.v / b, a.d / b};
}
template <class T>
Dual<T> operator/(double a, const Dual<T>& b) {
  return Dual<T>(a) / b;
}

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  T r = sqrt(x.v);
  return {r, x.d / (2.0 * r)};
}

template <class T>
Dual<T> exp(const Dual<T>& x) {
  T e = exp(x.v);
  return {e, x.d * e};
}

template <class T>
Dual<T> log(const Dual<T>& x) {
  return {log(x.v), x.d / x.v};
}

template <class T>
Dual<T> sin(const Dual<T>& x) {
  return {sin(x.v), x.d * cos(x.v)};
}

template <class T>
Dual<T> cos(const Dual<T>& x) {
  return {cos(x.v), -(x.d * sin(x.v))};
}

// Power with a constant exponent. p == 0 and p == 1 are special-cased so the
// derivative stays finite at a zero base.
template <class T>
Dual<T> pow(const Dual<T>& x, double p) {
  if (p == 0.0) return Dual<T>(1.0);
  if (p == 1.0) return x;
  T f = pow(x.v, p);
  return {f, p * pow(x.v, p - 1.0) * x.d};
}

}  // namespace finsler
