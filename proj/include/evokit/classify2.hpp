#pragma once

// Classification of 2-dimensional complex evolution algebras into E1..E6 (plus the abelian one),
// and a brute-force isomorphism search used as ground truth.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "evokit/special.hpp"
#include "evokit/two_dim_forms.hpp"

namespace evokit {

struct ClassLabel2D {
  Class2D variant = Class2D::Abelian;
  std::vector<Complex> params;  // (a2, a3) for E5, (a4) for E6

  std::string str() const {
    std::string s = to_string(variant);
    if (params.empty()) return s;
    s += "(";
    for (std::size_t i = 0; i < params.size(); ++i) s += (i ? "," : "") + format_scalar(params[i]);
    return s + ")";
  }
};

inline bool same_label(const ClassLabel2D& x, const ClassLabel2D& y, double tol = 1e-8) {
  if (x.variant != y.variant || x.params.size() != y.params.size()) return false;
  for (std::size_t i = 0; i < x.params.size(); ++i)
    if (std::abs(x.params[i] - y.params[i]) > tol * std::max(1.0, std::abs(x.params[i]))) return false;
  return true;
}

struct Classification2D {
  ClassLabel2D label;
  ChangeOfBasis<Complex> witness;  // apply_change_of_basis(E, witness) is the canonical table
  double residual = 0.0;
  std::size_t square_dim = 0;
  bool exact_decision = false;  // branch decisions made in exact arithmetic
};

/// Isomorphism invariants used to separate E1..E4 when dim E^2 = 1.
struct Invariants2D {
  std::size_t square_dim = 0;
  std::size_t annihilator_dim = 0;     // number of vanishing rows of A
  bool has_nonzero_idempotent = false;
  bool has_nonzero_nilpotent = false;
  bool e_times_square_nonzero = false;  // E * E^2 != 0
  bool square_times_square_zero = false;  // E^2 * E^2 = 0
};

namespace detail {

/// Argument in [0, 2 pi), with values just below 2 pi folded to 0.
inline double normalized_arg(const Complex& z) {
  double a = std::arg(z);
  if (a < 0) a += 2.0 * std::numbers::pi;
  if (a > 2.0 * std::numbers::pi - 1e-9) a = 0.0;
  return a;
}

/// Lexicographic (|x|, arg x) comparison; near-ties count as equal for complex input.
template <Field T>
bool modulus_arg_less(const T& x, const T& y) {
  if constexpr (field_traits<T>::exact) {
    using boost::multiprecision::abs;
    const Rational ax = abs(x), ay = abs(y);
    if (ax != ay) return ax < ay;
    return x > 0 && y < 0;  // arg 0 before arg pi
  } else {
    const double mx = std::abs(x), my = std::abs(y);
    if (std::abs(mx - my) > 1e-9 * std::max(1.0, std::max(mx, my))) return mx < my;
    return normalized_arg(x) < normalized_arg(y) - 1e-9;
  }
}

template <Field T>
struct ZeroTest {
  double thr;
  bool operator()(const T& x) const { return field_traits<T>::is_zero(x, thr); }
};

template <Field T>
ZeroTest<T> zero_test(const Matrix<T>& a, double tol) {
  return {field_traits<T>::exact ? 0.0 : tol * std::max(1.0, a.max_abs())};
}

inline ChangeOfBasis<Complex> swap_2d() {
  return ChangeOfBasis<Complex>::from_matrix(Matrix<Complex>::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
}

}  // namespace detail

template <Field T>
Invariants2D invariants_2d(const EvolutionAlgebra<T>& e, double tol = kDefaultTol) {
  if (e.dim() != 2) throw DimensionMismatch("expected a 2-dimensional algebra");
  const auto& a = e.structure();
  const auto zero = detail::zero_test(a, tol);
  Invariants2D inv;
  inv.square_dim = square_dim(e, tol);
  for (std::size_t i = 0; i < 2; ++i)
    if (zero(a(i, 0)) && zero(a(i, 1))) ++inv.annihilator_dim;
  inv.has_nonzero_idempotent = !idempotents_numeric(to_complex(e), 60, 7).elements.empty();
  inv.has_nonzero_nilpotent = absolute_nilpotent(e, tol).exists_nontrivial;
  // E * E^2 is spanned by e_i * r_k = (r_k)_i r_i
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 2; ++k)
      if (!zero(a(k, i)) && !(zero(a(i, 0)) && zero(a(i, 1)))) inv.e_times_square_nonzero = true;
  inv.square_times_square_zero = true;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t q = 0; q < 2; ++q) {
      const auto prod = multiply(e, Element<T>(a.row_vector(p)), Element<T>(a.row_vector(q)));
      for (std::size_t k = 0; k < 2; ++k)
        if (!field_traits<T>::is_zero(prod[k], zero.thr * std::max(1.0, a.max_abs() * a.max_abs())))
          inv.square_times_square_zero = false;
    }
  return inv;
}

/// Label implied by the invariants (dim E^2 = 1 only; other cases return nothing).
inline std::optional<Class2D> label_from_invariants(const Invariants2D& inv) {
  if (inv.square_dim != 1) return std::nullopt;
  if (inv.has_nonzero_idempotent) return inv.annihilator_dim == 1 ? Class2D::E1 : Class2D::E2;
  return inv.e_times_square_nonzero ? Class2D::E3 : Class2D::E4;
}

/// dim E^2 = 2: evolution-basis scalings and a swap reach E5(a2, a3) or E6(a4).
/// dim E^2 = 1: rows of A are t_i v; with kappa = v1^2 t1 + v2^2 t2 (v v = kappa v)
///   kappa != 0, one zero row -> E1;  kappa != 0, none -> E2;
///   kappa == 0, none -> E3;          kappa == 0, one zero row -> E4.
template <Field T>
Classification2D classify_2d(const EvolutionAlgebra<T>& e, double tol = kDefaultTol) {
  if (e.dim() != 2) throw DimensionMismatch("expected a 2-dimensional algebra");
  const auto& a = e.structure();
  const auto zero = detail::zero_test(a, tol);
  const auto ec = to_complex(e);
  auto cz = [](const T& x) { return to_complex(x); };
  auto cob = [](const std::vector<std::vector<Complex>>& rows) {
    return ChangeOfBasis<Complex>::from_matrix(Matrix<Complex>::from_rows(rows));
  };

  Classification2D out;
  out.exact_decision = field_traits<T>::exact;
  out.square_dim = square_dim(e, tol);
  ClassLabel2D& label = out.label;

  if (out.square_dim == 0) {
    label.variant = Class2D::Abelian;
    out.witness = ChangeOfBasis<Complex>::identity(2);
  } else if (out.square_dim == 2) {
    const T &p = a(0, 0), &q = a(0, 1), &r = a(1, 0), &s = a(1, 1);
    if (!zero(p) && !zero(s)) {
      const T a2 = q * s / (p * p);
      const T a3 = r * p / (s * s);
      label.variant = Class2D::E5;
      out.witness = cob(std::vector<std::vector<Complex>>{{cz(T(T(1) / p)), 0.0}, {0.0, cz(T(T(1) / s))}});
      if (detail::modulus_arg_less(a3, a2)) {
        out.witness = out.witness.then(detail::swap_2d());
        label.params = {cz(a3), cz(a2)};
      } else {
        label.params = {cz(a2), cz(a3)};
      }
    } else {
      // make the (1,1) entry vanish, then e1' = lambda e1, e2' = mu e2 with
      // lambda^3 = 1 / (q^2 r), mu = lambda^2 q, a4 = mu s
      const bool swap = !zero(p);
      const Complex pq = cz(swap ? r : q), pr = cz(swap ? q : r), ps = cz(swap ? p : s);
      const Complex base = std::exp(std::log(1.0 / (pq * pq * pr)) / 3.0);
      const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
      Complex best_lambda = base;
      double best_arg = 10.0;
      for (int k = 0; k < 3; ++k) {
        const Complex lambda = base * std::pow(omega, k);
        const Complex a4 = lambda * lambda * pq * ps;
        const double arg = std::abs(a4) == 0.0 ? 0.0 : detail::normalized_arg(a4);
        if (arg < best_arg - 1e-12) {
          best_arg = arg;
          best_lambda = lambda;
        }
        if (zero(swap ? p : s)) break;
      }
      const Complex mu = best_lambda * best_lambda * pq;
      label.variant = Class2D::E6;
      label.params = {zero(swap ? p : s) ? Complex(0.0) : Complex(mu * ps)};
      out.witness = cob(std::vector<std::vector<Complex>>{{best_lambda, 0.0}, {0.0, mu}});
      if (swap) out.witness = detail::swap_2d().then(out.witness);
    }
  } else {
    // v: first nonzero row (largest one for complex input), k: its first / largest entry
    std::size_t f = zero(a(0, 0)) && zero(a(0, 1)) ? 1 : 0;
    if (!field_traits<T>::exact && max_abs(a.row_vector(1)) > max_abs(a.row_vector(0))) f = 1;
    std::size_t k = zero(a(f, 0)) ? 1 : 0;
    if (!field_traits<T>::exact && magnitude(a(f, 1)) > magnitude(a(f, 0))) k = 1;
    const std::vector<T> v = a.row_vector(f);
    const std::array<T, 2> t{a(0, k) / v[k], a(1, k) / v[k]};
    const T kappa = v[0] * v[0] * t[0] + v[1] * v[1] * t[1];
    std::optional<std::size_t> zrow;
    for (std::size_t i = 0; i < 2; ++i)
      if (zero(a(i, 0)) && zero(a(i, 1))) zrow = i;
    const bool kappa_zero = field_traits<T>::exact
                                ? kappa == T(0)
                                : magnitude(kappa) <= tol * std::max(1.0, max_abs(v) * max_abs(v) *
                                                                              std::max(magnitude(t[0]), magnitude(t[1])));
    if (!kappa_zero && zrow) {
      label.variant = Class2D::E1;
      const std::size_t z = *zrow;
      const Complex kc = cz(kappa);
      out.witness = cob(std::vector<std::vector<Complex>>{{cz(v[0]) / kc, cz(v[1]) / kc}, {z == 0 ? 1.0 : 0.0, z == 1 ? 1.0 : 0.0}});
    } else if (!kappa_zero) {
      label.variant = Class2D::E2;
      const Complex kc = cz(kappa);
      const Complex c = 1.0 / (kc * std::sqrt(cz(t[0]) * cz(t[1])));
      out.witness = cob(std::vector<std::vector<Complex>>{{cz(v[0]) / kc, cz(v[1]) / kc}, {-c * cz(v[1]) * cz(t[1]), c * cz(v[0]) * cz(t[0])}});
    } else if (!zrow) {
      label.variant = Class2D::E3;
      const T lambda = T(1) / (t[0] * v[0]);
      const T mu = v[1] / (t[0] * v[0] * v[0]);
      out.witness = cob(std::vector<std::vector<Complex>>{{cz(lambda), 0.0}, {0.0, cz(mu)}});
    } else {
      label.variant = Class2D::E4;
      const std::size_t w = 1 - *zrow;
      std::vector<Complex> ew(2, 0.0);
      ew[w] = 1.0;
      const auto sq = square(ec, Element<Complex>(ew));
      out.witness = cob(std::vector<std::vector<Complex>>{{ew[0], ew[1]}, {sq[0], sq[1]}});
    }
  }
  out.residual = isomorphism_residual(ec, out.witness, two_dim_algebra<Complex>(label.variant, label.params));
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

/// G_{ij} = W_i *_F W_j - delta_ij sum_k a_{ik} W_k for (i,j) in {(0,0),(0,1),(1,1)}, both coordinates.
inline std::vector<Complex> iso_equations(const Matrix<Complex>& ea, const Matrix<Complex>& fa,
                                          const std::vector<Complex>& w) {
  std::vector<Complex> g;
  const std::pair<int, int> pairs[3] = {{0, 0}, {0, 1}, {1, 1}};
  for (auto [i, j] : pairs)
    for (int c = 0; c < 2; ++c) {
      Complex s = 0.0;
      for (int m = 0; m < 2; ++m) s += w[2 * i + m] * w[2 * j + m] * fa(m, c);
      if (i == j)
        for (int k = 0; k < 2; ++k) s -= ea(i, k) * w[2 * k + c];
      g.push_back(s);
    }
  return g;
}

inline Matrix<Complex> iso_jacobian(const Matrix<Complex>& ea, const Matrix<Complex>& fa,
                                    const std::vector<Complex>& w) {
  Matrix<Complex> jac(6, 4);
  const std::pair<int, int> pairs[3] = {{0, 0}, {0, 1}, {1, 1}};
  int row = 0;
  for (auto [i, j] : pairs)
    for (int c = 0; c < 2; ++c, ++row)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
          Complex d = 0.0;
          if (p == i) d += w[2 * j + q] * fa(q, c);
          if (p == j) d += w[2 * i + q] * fa(q, c);
          if (i == j && q == c) d -= ea(i, p);
          jac(row, 2 * p + q) = d;
        }
  return jac;
}

}  // namespace detail

/// Random-restart Levenberg-Marquardt search for W (rows = images of e_i in F) with
/// W_i W_j = delta_ij sum_k a_{ik} W_k. Returns a witness with apply_change_of_basis(F, W) ~ E,
/// verified to 1e-8; nothing if no invertible solution was found.
inline std::optional<ChangeOfBasis<Complex>> oracle_iso_2d(const EvolutionAlgebra<Complex>& e,
                                                           const EvolutionAlgebra<Complex>& f,
                                                           std::size_t attempts = 200, std::uint64_t seed = 1) {
  if (e.dim() != 2 || f.dim() != 2) throw DimensionMismatch("oracle_iso_2d expects 2-dimensional algebras");
  const auto& ea = e.structure();
  const auto& fa = f.structure();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto norm2 = [](const std::vector<Complex>& g) {
    double s = 0.0;
    for (const auto& z : g) s += std::norm(z);
    return s;
  };

  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    const double radius = std::exp(gauss(rng));
    std::vector<Complex> w(4);
    for (auto& z : w) z = radius * Complex(gauss(rng), gauss(rng));
    auto g = detail::iso_equations(ea, fa, w);
    double cost = norm2(g);
    double damping = 1e-3;
    for (int iter = 0; iter < 200 && cost > 1e-28; ++iter) {
      const auto jac = detail::iso_jacobian(ea, fa, w);
      Matrix<Complex> normal(4, 4);
      std::vector<Complex> rhs(4, 0.0);
      for (std::size_t p = 0; p < 4; ++p) {
        for (std::size_t q = 0; q < 4; ++q)
          for (std::size_t r = 0; r < 6; ++r) normal(p, q) += std::conj(jac(r, p)) * jac(r, q);
        for (std::size_t r = 0; r < 6; ++r) rhs[p] -= std::conj(jac(r, p)) * g[r];
      }
      bool stepped = false;
      for (int tries = 0; tries < 12 && !stepped; ++tries) {
        Matrix<Complex> damped = normal;
        for (std::size_t p = 0; p < 4; ++p) damped(p, p) += damping * (1.0 + std::abs(normal(p, p)));
        std::vector<Complex> delta;
        try {
          delta = rhs * invert(damped, 1e-300).transpose();
        } catch (const SingularMatrix&) {
          damping *= 10.0;
          continue;
        }
        std::vector<Complex> trial = w;
        for (std::size_t p = 0; p < 4; ++p) trial[p] += delta[p];
        auto gt = detail::iso_equations(ea, fa, trial);
        const double ct = norm2(gt);
        if (ct < cost) {
          w = std::move(trial);
          g = std::move(gt);
          cost = ct;
          damping = std::max(damping / 10.0, 1e-15);
          stepped = true;
        } else {
          damping *= 10.0;
        }
      }
      if (!stepped) break;
    }
    if (cost > 1e-20) continue;
    const Matrix<Complex> wm(2, 2, w);
    const double scale = std::max(1e-300, wm.max_abs());
    if (std::abs(det(wm)) < 1e-6 * scale * scale) continue;
    try {
      auto cb = ChangeOfBasis<Complex>::from_matrix(wm, 1e-12);
      if (isomorphism_residual(f, cb, e) < 1e-8) return cb;
    } catch (const SingularMatrix&) {
    }
  }
  return std::nullopt;
}

}  // namespace evokit
