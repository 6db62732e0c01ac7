#pragma once

#include "lagconn/expr.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace lagconn {

template <class F>
using Matrix = std::vector<std::vector<F>>;

template <class F>
struct FieldTraits;

template <>
struct FieldTraits<Rational> {
  static bool is_zero(const Rational& x) { return x == 0; }
  static Rational zero_like(const Rational&) { return Rational(0); }
  static Rational one_like(const Rational&) { return Rational(1); }
  static std::size_t cost(const Rational&) { return 0; }
};

template <>
struct FieldTraits<Expr> {
  static bool is_zero(const Expr& x) { return x.is_zero(); }
  static Expr zero_like(const Expr& x) { return Expr(x.nvars()); }
  static Expr one_like(const Expr& x) { return Expr(x.nvars(), Rational(1)); }
  static std::size_t cost(const Expr& x) { return x.num().size() + x.den().size(); }
};

/// Reduced row echelon form computed in place; returns pivot columns.
/// Only the first `ncols_pivot` columns are eligible as pivots.
template <class F>
std::vector<std::size_t> rref(Matrix<F>& m, std::size_t ncols_pivot) {
  using T = FieldTraits<F>;
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  const std::size_t nrows = m.size();
  for (std::size_t col = 0; col < ncols_pivot && row < nrows; ++col) {
    // cheapest nonzero pivot keeps expression swell down
    std::optional<std::size_t> best;
    for (std::size_t r = row; r < nrows; ++r) {
      if (T::is_zero(m[r][col])) continue;
      if (!best || T::cost(m[r][col]) < T::cost(m[*best][col])) best = r;
    }
    if (!best) continue;
    std::swap(m[row], m[*best]);
    const F inv = T::one_like(m[row][col]) / m[row][col];
    for (auto& x : m[row])
      if (!T::is_zero(x)) x = x * inv;
    for (std::size_t r = 0; r < nrows; ++r) {
      if (r == row || T::is_zero(m[r][col])) continue;
      const F factor = m[r][col];
      for (std::size_t c = 0; c < m[r].size(); ++c)
        if (!T::is_zero(m[row][c])) m[r][c] = m[r][c] - factor * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class F>
struct SolveResult {
  std::size_t rank = 0;
  bool consistent = true;
  std::optional<std::size_t> bad_rhs;  // right-hand side column that is out of range
  Matrix<F> x;                         // ncols x nrhs, free variables set to zero
};

/// Solves A X = B exactly, all right-hand sides at once.
template <class F>
SolveResult<F> solve(const Matrix<F>& a, const Matrix<F>& b, const F& zero) {
  using T = FieldTraits<F>;
  const std::size_t nrows = a.size();
  const std::size_t ncols = nrows ? a[0].size() : 0;
  const std::size_t nrhs = nrows ? b[0].size() : 0;
  Matrix<F> m(nrows);
  for (std::size_t r = 0; r < nrows; ++r) {
    m[r] = a[r];
    m[r].insert(m[r].end(), b[r].begin(), b[r].end());
  }
  auto pivots = rref(m, ncols);
  SolveResult<F> out;
  out.rank = pivots.size();
  for (std::size_t r = out.rank; r < nrows && out.consistent; ++r)
    for (std::size_t c = 0; c < nrhs; ++c)
      if (!T::is_zero(m[r][ncols + c])) {
        out.consistent = false;
        out.bad_rhs = c;
        break;
      }
  out.x.assign(ncols, std::vector<F>(nrhs, zero));
  for (std::size_t r = 0; r < out.rank; ++r)
    for (std::size_t c = 0; c < nrhs; ++c) out.x[pivots[r]][c] = m[r][ncols + c];
  return out;
}

template <class F>
std::size_t rank(Matrix<F> a) {
  const std::size_t ncols = a.empty() ? 0 : a[0].size();
  return rref(a, ncols).size();
}

/// Basis of {x : A x = 0}.
template <class F>
std::vector<std::vector<F>> nullspace(Matrix<F> a, std::size_t ncols, const F& zero) {
  using T = FieldTraits<F>;
  auto pivots = rref(a, ncols);
  std::vector<bool> is_pivot(ncols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<F>> basis;
  for (std::size_t f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<F> v(ncols, zero);
    v[f] = T::one_like(zero);
    for (std::size_t r = 0; r < pivots.size(); ++r)
      if (!T::is_zero(a[r][f])) v[pivots[r]] = -a[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class F>
F determinant(Matrix<F> a, const F& zero) {
  using T = FieldTraits<F>;
  const std::size_t n = a.size();
  F det = T::one_like(zero);
  for (std::size_t col = 0; col < n; ++col) {
    std::optional<std::size_t> best;
    for (std::size_t r = col; r < n; ++r) {
      if (T::is_zero(a[r][col])) continue;
      if (!best || T::cost(a[r][col]) < T::cost(a[*best][col])) best = r;
    }
    if (!best) return zero;
    if (*best != col) {
      std::swap(a[col], a[*best]);
      det = -det;
    }
    det = det * a[col][col];
    const F inv = T::one_like(zero) / a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (T::is_zero(a[r][col])) continue;
      const F factor = a[r][col] * inv;
      for (std::size_t c = col; c < n; ++c)
        if (!T::is_zero(a[col][c])) a[r][c] = a[r][c] - factor * a[col][c];
    }
  }
  return det;
}

/// Exact inverse by Gauss-Jordan; nullopt when singular.
template <class F>
std::optional<Matrix<F>> inverse(const Matrix<F>& a, const F& zero) {
  using T = FieldTraits<F>;
  const std::size_t n = a.size();
  Matrix<F> id(n, std::vector<F>(n, zero));
  for (std::size_t i = 0; i < n; ++i) id[i][i] = T::one_like(zero);
  auto res = solve(a, id, zero);
  if (res.rank < n) return std::nullopt;
  return std::move(res.x);
}

Matrix<Rational> eval_matrix(const Matrix<Expr>& m, std::span<const Rational> point);

}  // namespace lagconn
