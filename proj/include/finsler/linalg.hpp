#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/errors.hpp"

namespace finsler {

// Dense square matrix over an arbitrary scalar (double or nested Dual).
// Eigen handles the plain-double world; this covers the AD-generic paths.
template <class S>
struct SquareMat {
  int n = 0;
  std::vector<S> a;

  SquareMat() = default;
  explicit SquareMat(int size) : n(size), a(static_cast<size_t>(size) * size) {}

  S& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const S& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

// Gaussian elimination with partial pivoting on leaf values. The scalar type
// may carry derivative payload; pivot choice only looks at the values.
template <class S>
std::vector<S> solve_linear(SquareMat<S> A, std::vector<S> rhs,
                            ErrorCode on_singular = ErrorCode::not_positive_definite) {
  const int n = A.n;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  for (int c = 0; c < n; ++c) {
    int p = c;
    double best = std::abs(value(A(c, c)));
    for (int r = c + 1; r < n; ++r) {
      double m = std::abs(value(A(r, c)));
      if (m > best) {
        best = m;
        p = r;
      }
    }
    if (!(best > 0.0)) throw FinslerError(on_singular, "singular linear system");
    if (p != c) {
      for (int k = 0; k < n; ++k) std::swap(A(c, k), A(p, k));
      std::swap(rhs[c], rhs[p]);
    }
    for (int r = c + 1; r < n; ++r) {
      S f = A(r, c) / A(c, c);
      for (int k = c; k < n; ++k) A(r, k) = A(r, k) - f * A(c, k);
      rhs[r] = rhs[r] - f * rhs[c];
    }
  }
  std::vector<S> z(rhs.begin(), rhs.end());
  for (int r = n - 1; r >= 0; --r) {
    S s = z[r];
    for (int k = r + 1; k < n; ++k) s = s - A(r, k) * z[k];
    z[r] = s / A(r, r);
  }
  return z;
}

inline Eigen::MatrixXd to_eigen(const SquareMat<double>& m) {
  Eigen::MatrixXd out(m.n, m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) out(i, j) = m(i, j);
  return out;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd from_std(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace finsler
