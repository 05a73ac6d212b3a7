#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evokit/linalg.hpp"

namespace evokit {

/// An element written in the evolution basis.
template <Field T>
struct Element {
  std::vector<T> coords;

  Element() = default;
  explicit Element(std::vector<T> c) : coords(std::move(c)) {}

  static Element zero(std::size_t n) { return Element(std::vector<T>(n, T(0))); }
  static Element basis(std::size_t n, std::size_t i) {
    Element e = zero(n);
    e.coords.at(i) = T(1);
    return e;
  }

  std::size_t size() const noexcept { return coords.size(); }
  const T& operator[](std::size_t i) const { return coords[i]; }
  T& operator[](std::size_t i) { return coords[i]; }

  bool is_zero() const {
    return std::all_of(coords.begin(), coords.end(), [](const T& x) { return x == T(0); });
  }
  double norm_inf() const { return max_abs(coords); }

  friend Element operator+(Element a, const Element& b) {
    check(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) a.coords[i] += b.coords[i];
    return a;
  }
  friend Element operator-(Element a, const Element& b) {
    check(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) a.coords[i] -= b.coords[i];
    return a;
  }
  friend Element operator*(const T& s, Element a) {
    for (auto& x : a.coords) x *= s;
    return a;
  }
  friend bool operator==(const Element& a, const Element& b) { return a.coords == b.coords; }

 private:
  static void check(const Element& a, const Element& b) {
    if (a.size() != b.size()) throw DimensionMismatch("elements of different dimension");
  }
};

/// Finite-dimensional evolution algebra: e_i e_i = sum_k a_{i,k} e_k, e_i e_j = 0 (i != j).
/// Row i of the structure matrix holds the coordinates of e_i e_i.
template <Field T>
class EvolutionAlgebra {
 public:
  explicit EvolutionAlgebra(Matrix<T> structure) : a_(std::move(structure)) {
    if (!a_.square() || a_.rows() == 0)
      throw DimensionMismatch("structure matrix must be square with dimension >= 1");
  }

  static EvolutionAlgebra zero(std::size_t n) { return EvolutionAlgebra(Matrix<T>(n, n)); }

  std::size_t dim() const noexcept { return a_.rows(); }
  const Matrix<T>& structure() const noexcept { return a_; }
  const T& coeff(std::size_t i, std::size_t k) const { return a_(i, k); }
  static constexpr Domain domain() { return field_traits<T>::domain; }

  friend bool operator==(const EvolutionAlgebra& x, const EvolutionAlgebra& y) { return x.a_ == y.a_; }

 private:
  Matrix<T> a_;
};

template <Field T>
void require_member(const EvolutionAlgebra<T>& e, const Element<T>& x) {
  if (x.size() != e.dim())
    throw DimensionMismatch("element of dimension " + std::to_string(x.size()) + " in algebra of dimension " +
                            std::to_string(e.dim()));
}

/// (x y)_k = sum_i x_i y_i a_{i,k}
template <Field T>
Element<T> multiply(const EvolutionAlgebra<T>& e, const Element<T>& x, const Element<T>& y) {
  require_member(e, x);
  require_member(e, y);
  const std::size_t n = e.dim();
  Element<T> out = Element<T>::zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    const T w = x[i] * y[i];
    if (w == T(0)) continue;
    for (std::size_t k = 0; k < n; ++k) out[k] += w * e.coeff(i, k);
  }
  return out;
}

template <Field T>
Element<T> square(const EvolutionAlgebra<T>& e, const Element<T>& x) {
  return multiply(e, x, x);
}

/// x^[1] = x, x^[k+1] = x^[k] x^[k].
template <Field T>
Element<T> plenary_power(const EvolutionAlgebra<T>& e, Element<T> x, std::size_t k) {
  if (k == 0) throw InvalidParameters("plenary power index must be >= 1");
  require_member(e, x);
  for (std::size_t step = 1; step < k; ++step) x = square(e, x);
  return x;
}

/// Matrix of y -> y x acting on row vectors: entry (i, k) = x_i a_{i,k}.
template <Field T>
Matrix<T> right_mult_matrix(const EvolutionAlgebra<T>& e, const Element<T>& x) {
  require_member(e, x);
  const std::size_t n = e.dim();
  Matrix<T> r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == T(0)) continue;
    for (std::size_t k = 0; k < n; ++k) r(i, k) = x[i] * e.coeff(i, k);
  }
  return r;
}

/// Every row of A sums to one (exactly, or within 1e-12 for complex).
template <Field T>
bool is_markov(const EvolutionAlgebra<T>& e) {
  for (std::size_t i = 0; i < e.dim(); ++i) {
    T s(0);
    for (const T& x : e.structure().row(i)) s += x;
    if constexpr (field_traits<T>::exact) {
      if (s != 1) return false;
    } else if (std::abs(s - T(1)) > 1e-12) {
      return false;
    }
  }
  return true;
}

/// dim E^2 = rank A.
template <Field T>
std::size_t square_dim(const EvolutionAlgebra<T>& e, double tol = kDefaultTol) {
  return rank(e.structure(), tol);
}

template <Field T>
EvolutionAlgebra<Complex> to_complex(const EvolutionAlgebra<T>& e) {
  return EvolutionAlgebra<Complex>(to_complex(e.structure()));
}

// ---------------------------------------------------------------------------

/// Invertible basis change. Row j of `forward` is the new basis vector e'_j in old coordinates.
template <Field T>
struct ChangeOfBasis {
  Matrix<T> forward;
  Matrix<T> inverse;
  double residual = 0.0;  // max |(W W^-1 - I)_{ij}|

  static ChangeOfBasis from_matrix(Matrix<T> w, double tol = kDefaultTol) {
    Matrix<T> inv = invert(w, tol);
    const double res = max_abs_diff(Matrix<T>(w * inv), Matrix<T>::identity(w.rows()));
    return {std::move(w), std::move(inv), res};
  }

  static ChangeOfBasis identity(std::size_t n) {
    return {Matrix<T>::identity(n), Matrix<T>::identity(n), 0.0};
  }

  std::size_t dim() const noexcept { return forward.rows(); }

  /// Old coordinates -> new coordinates.
  std::vector<T> to_new(const std::vector<T>& old_coords) const { return old_coords * inverse; }
  /// First apply `this`, then express the result through `next` (a basis change of the new basis).
  ChangeOfBasis then(const ChangeOfBasis& next) const {
    Matrix<T> w = next.forward * forward;
    Matrix<T> inv = inverse * next.inverse;
    const double res = max_abs_diff(Matrix<T>(w * inv), Matrix<T>::identity(w.rows()));
    return {std::move(w), std::move(inv), res};
  }
};

template <Field T>
ChangeOfBasis<Complex> to_complex(const ChangeOfBasis<T>& cb) {
  if constexpr (std::is_same_v<T, Complex>) {
    return cb;
  } else {
    return ChangeOfBasis<Complex>::from_matrix(to_complex(cb.forward));
  }
}

template <Field T>
struct TransformedAlgebra {
  EvolutionAlgebra<T> algebra;
  double offdiag_residual = 0.0;  // max over i != j of |e'_i e'_j|_inf
};

/// Recomputes the multiplication table in the basis given by `cb`.
/// Products e'_i e'_j (i != j) are not assumed to vanish; their size is reported.
template <Field T>
TransformedAlgebra<T> apply_change_of_basis(const EvolutionAlgebra<T>& e, const ChangeOfBasis<T>& cb) {
  const std::size_t n = e.dim();
  if (cb.dim() != n) throw DimensionMismatch("change of basis has the wrong dimension");
  std::vector<Element<T>> basis;
  basis.reserve(n);
  for (std::size_t j = 0; j < n; ++j) basis.emplace_back(cb.forward.row_vector(j));

  Matrix<T> a(n, n);
  double offdiag = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const std::vector<T> prod = cb.to_new(multiply(e, basis[i], basis[j]).coords);
      if (i == j)
        std::copy(prod.begin(), prod.end(), a.row(i).begin());
      else
        offdiag = std::max(offdiag, max_abs(prod));
    }
  return {EvolutionAlgebra<T>(std::move(a)), offdiag};
}

/// Largest deviation of `cb` applied to `e` from the target table, including off-diagonal products.
template <Field T>
double isomorphism_residual(const EvolutionAlgebra<T>& e, const ChangeOfBasis<T>& cb,
                            const EvolutionAlgebra<T>& target) {
  const auto t = apply_change_of_basis(e, cb);
  return std::max(t.offdiag_residual, max_abs_diff(t.algebra.structure(), target.structure()));
}

/// Permutation matrix whose row j is the unit vector at source[j].
template <Field T>
Matrix<T> relabeling_matrix(const std::vector<std::size_t>& source) {
  const std::size_t n = source.size();
  Matrix<T> w(n, n);
  for (std::size_t j = 0; j < n; ++j) w(j, source.at(j)) = T(1);
  return w;
}

}  // namespace evokit
