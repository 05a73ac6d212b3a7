#pragma once

// Dense exact / floating-point elimination shared by the rest of the library.
//
// Rational matrices are handled exactly: rank and determinant go through
// fraction-free (Bareiss) elimination on integerized rows, kernels and inverses
// through exact Gauss-Jordan. Complex matrices use partial pivoting with the
// pivot threshold tol * max(1, max |entry|).

#include <cstddef>
#include <utility>
#include <vector>

#include "evokit/matrix.hpp"

namespace evokit {

namespace detail {

using IntRows = std::vector<std::vector<BigInt>>;

/// Clears denominators row by row; `scale` receives the factor applied to each row.
inline IntRows integerize(const Matrix<Rational>& m, std::vector<BigInt>* scale = nullptr) {
  IntRows out(m.rows(), std::vector<BigInt>(m.cols()));
  if (scale) scale->assign(m.rows(), BigInt(1));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    BigInt l = 1;
    for (const Rational& x : m.row(i)) l = boost::multiprecision::lcm(l, BigInt(boost::multiprecision::denominator(x)));
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Rational& x = m(i, j);
      out[i][j] = boost::multiprecision::numerator(x) * (l / boost::multiprecision::denominator(x));
    }
    if (scale) (*scale)[i] = l;
  }
  return out;
}

struct BareissResult {
  std::size_t rank = 0;
  BigInt last_pivot = 1;
  bool odd_swaps = false;
};

/// Fraction-free echelon reduction in place. Every division is exact.
inline BareissResult bareiss(IntRows& a, std::size_t cols) {
  BareissResult res;
  BigInt prev = 1;
  std::size_t r = 0;
  const std::size_t rows = a.size();
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    if (p != r) {
      std::swap(a[p], a[r]);
      res.odd_swaps = !res.odd_swaps;
    }
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  res.rank = r;
  res.last_pivot = prev;
  return res;
}

template <Field T>
double pivot_threshold(const Matrix<T>& m, double tol) {
  return tol * std::max(1.0, m.max_abs());
}

}  // namespace detail

/// Reduced row echelon form together with its pivot columns.
template <Field T>
struct Echelon {
  Matrix<T> reduced;
  std::vector<std::size_t> pivots;
};

template <Field T>
Echelon<T> rref(Matrix<T> m, double tol = kDefaultTol) {
  const double thr = field_traits<T>::exact ? 0.0 : detail::pivot_threshold(m, tol);
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = m.rows();
    if constexpr (field_traits<T>::exact) {
      for (std::size_t i = r; i < m.rows(); ++i)
        if (m(i, c) != 0) {
          p = i;
          break;
        }
    } else {
      double best = thr;
      for (std::size_t i = r; i < m.rows(); ++i)
        if (magnitude(m(i, c)) > best) {
          best = magnitude(m(i, c));
          p = i;
        }
    }
    if (p == m.rows()) {
      if constexpr (!field_traits<T>::exact)
        for (std::size_t i = r; i < m.rows(); ++i) m(i, c) = T(0);
      continue;
    }
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    const T inv = T(1) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    m(r, c) = T(1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == T(0)) continue;
      const T f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
      m(i, c) = T(0);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

/// Dimension of the row space. `tol` is ignored for rational input.
template <Field T>
std::size_t rank(const Matrix<T>& m, double tol = kDefaultTol) {
  if (m.empty()) return 0;
  if constexpr (field_traits<T>::exact) {
    auto a = detail::integerize(m);
    return detail::bareiss(a, m.cols()).rank;
  } else {
    return rref(m, tol).pivots.size();
  }
}

/// Basis of {v : m v = 0}, one vector per free column of the RREF (free entry = 1).
template <Field T>
std::vector<std::vector<T>> solve_kernel(const Matrix<T>& m, double tol = kDefaultTol) {
  const auto ech = rref(m, tol);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : ech.pivots) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<T> v(m.cols(), T(0));
    v[f] = T(1);
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) v[ech.pivots[r]] = -ech.reduced(r, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <Field T>
T det(const Matrix<T>& m) {
  if (!m.square()) throw DimensionMismatch("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return T(1);
  if constexpr (field_traits<T>::exact) {
    std::vector<BigInt> scale;
    auto a = detail::integerize(m, &scale);
    const auto res = detail::bareiss(a, n);
    if (res.rank < n) return Rational(0);
    BigInt denom = 1;
    for (const auto& s : scale) denom *= s;
    Rational d(res.last_pivot, denom);
    return res.odd_swaps ? Rational(-d) : d;
  } else {
    Matrix<T> a = m;
    T d(1);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      for (std::size_t i = c + 1; i < n; ++i)
        if (magnitude(a(i, c)) > magnitude(a(p, c))) p = i;
      if (a(p, c) == T(0)) return T(0);
      if (p != c) {
        for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
        d = -d;
      }
      d *= a(c, c);
      for (std::size_t i = c + 1; i < n; ++i) {
        const T f = a(i, c) / a(c, c);
        for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(c, j);
      }
    }
    return d;
  }
}

/// Inverse via Gauss-Jordan. Throws SingularMatrix when no usable pivot exists.
template <Field T>
Matrix<T> invert(const Matrix<T>& m, double tol = kDefaultTol) {
  if (!m.square()) throw DimensionMismatch("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  Matrix<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  const double thr = field_traits<T>::exact ? 0.0 : detail::pivot_threshold(m, tol);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (magnitude(aug(i, c)) > magnitude(aug(p, c))) p = i;
    if (field_traits<T>::is_zero(aug(p, c), thr)) throw SingularMatrix();
    if (p != c)
      for (std::size_t j = 0; j < 2 * n; ++j) std::swap(aug(p, j), aug(c, j));
    const T inv = T(1) / aug(c, c);
    for (std::size_t j = 0; j < 2 * n; ++j) aug(c, j) *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || aug(i, c) == T(0)) continue;
      const T f = aug(i, c);
      for (std::size_t j = 0; j < 2 * n; ++j) aug(i, j) -= f * aug(c, j);
    }
  }
  Matrix<T> out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = aug(i, n + j);
  return out;
}

/// Solves x * basis = target for row vectors, where `basis` has independent rows.
/// Returns nothing when target is outside the row span.
template <Field T>
std::optional<std::vector<T>> solve_in_row_span(const Matrix<T>& basis, const std::vector<T>& target,
                                                double tol = kDefaultTol) {
  // Columns of the transposed system are the basis rows; augment with the target.
  const std::size_t k = basis.rows();
  const std::size_t len = basis.cols();
  Matrix<T> sys(len, k + 1);
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < k; ++j) sys(i, j) = basis(j, i);
    sys(i, k) = target[i];
  }
  const auto ech = rref(sys, tol);
  if (!ech.pivots.empty() && ech.pivots.back() == k) return std::nullopt;
  if (ech.pivots.size() < k) throw SingularMatrix("basis rows are dependent");
  std::vector<T> x(k, T(0));
  for (std::size_t r = 0; r < k; ++r) x[ech.pivots[r]] = ech.reduced(r, k);
  return x;
}

}  // namespace evokit
