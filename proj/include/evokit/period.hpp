#pragma once

// Plenary-power recurrence sets and the three-dimensional family with zero diagonal
//   e1 e1 = a2 e2 + a3 e3,  e2 e2 = b1 e1 + b3 e3,  e3 e3 = c1 e1 + c2 e2.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "evokit/algebra.hpp"

namespace evokit {

inline constexpr std::size_t kDefaultBitCap = 1'000'000;
inline constexpr std::size_t kDefaultDepth = 12;

struct PeriodReport {
  std::size_t generator = 0;  // 0-based index j
  std::size_t depth = 0;      // requested K
  std::vector<std::size_t> recurrence_set;  // m in [2, K] with e_j in the support of e_j^[m]
  bool infinite_up_to_depth = false;
  bool partial = false;          // stopped early because of the bit-size cap
  std::size_t depth_reached = 0;  // last m actually examined
};

/// Recurrence set of e_j up to plenary depth K. Rational coefficients are tested exactly;
/// complex ones count as zero below 1e-12 times the largest coordinate of e_j^[m].
template <Field T>
PeriodReport recurrence_report(const EvolutionAlgebra<T>& e, std::size_t j, std::size_t depth,
                               std::size_t bit_cap = kDefaultBitCap) {
  if (depth < 2) throw PreconditionFailed("depth K must be >= 2");
  if (j >= e.dim()) throw PreconditionFailed("generator index out of range");
  PeriodReport report;
  report.generator = j;
  report.depth = depth;
  auto x = Element<T>::basis(e.dim(), j);
  for (std::size_t m = 2; m <= depth; ++m) {
    x = square(e, x);
    bool present = false;
    if constexpr (field_traits<T>::exact) {
      present = x[j] != 0;
    } else {
      present = std::abs(x[j]) >= 1e-12 * x.norm_inf() && x[j] != T(0);
    }
    if (present) report.recurrence_set.push_back(m);
    report.depth_reached = m;
    if constexpr (field_traits<T>::exact) {
      std::size_t bits = 0;
      for (const auto& c : x.coords) bits = std::max(bits, bit_size(c));
      if (bits > bit_cap && m < depth) {
        report.partial = true;
        break;
      }
    }
  }
  report.infinite_up_to_depth = report.recurrence_set.empty();
  return report;
}

// ---------------------------------------------------------------------------

template <Field T>
struct ThreeDimCoefficients {
  T a1{0}, a2{0}, a3{0};
  T b1{0}, b2{0}, b3{0};
  T c1{0}, c2{0}, c3{0};

  static ThreeDimCoefficients from_algebra(const EvolutionAlgebra<T>& e) {
    if (e.dim() != 3) throw DimensionMismatch("expected a 3-dimensional algebra");
    const auto& a = e.structure();
    return {a(0, 0), a(0, 1), a(0, 2), a(1, 0), a(1, 1), a(1, 2), a(2, 0), a(2, 1), a(2, 2)};
  }

  /// Zero diagonal with the six given off-diagonal coefficients.
  static ThreeDimCoefficients off_diagonal(T a2, T a3, T b1, T b3, T c1, T c2) {
    return {T(0), a2, a3, b1, T(0), b3, c1, c2, T(0)};
  }

  EvolutionAlgebra<T> algebra() const {
    return EvolutionAlgebra<T>(Matrix<T>::from_rows({{a1, a2, a3}, {b1, b2, b3}, {c1, c2, c3}}));
  }

  bool zero_diagonal() const { return a1 == T(0) && b2 == T(0) && c3 == T(0); }
  bool all_off_diagonal_nonzero() const {
    return a2 != T(0) && a3 != T(0) && b1 != T(0) && b3 != T(0) && c1 != T(0) && c2 != T(0);
  }
};

template <std::size_t N>
struct IdentityCheck {
  std::array<bool, N> holds{};
  std::array<double, N> residuals{};
  bool all() const {
    for (bool h : holds)
      if (!h) return false;
    return true;
  }
};

namespace detail {

template <Field T>
void require_zero_diagonal(const ThreeDimCoefficients<T>& c) {
  if (!c.zero_diagonal()) throw DiagonalNotZero();
}

/// p + q == 0, exactly or within 1e-10 relative to the larger term.
template <Field T>
std::pair<bool, double> sum_vanishes(const T& p, const T& q) {
  const T s = p + q;
  const double r = magnitude(s);
  if constexpr (field_traits<T>::exact) {
    return {s == 0, r};
  } else {
    return {r <= 1e-10 * std::max({1.0, magnitude(p), magnitude(q)}), r};
  }
}

template <Field T, std::size_t N>
IdentityCheck<N> check_sums(const std::array<std::pair<T, T>, N>& terms) {
  IdentityCheck<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    auto [ok, r] = sum_vanishes(terms[i].first, terms[i].second);
    out.holds[i] = ok;
    out.residuals[i] = r;
  }
  return out;
}

}  // namespace detail

/// e_i-coefficient of e_i^[3] vanishes for i = 1, 2, 3:
///   a2^2 b1 + a3^2 c1, b1^2 a2 + b3^2 c2, c1^2 a3 + c2^2 b3.
template <Field T>
IdentityCheck<3> check_cube_conditions(const ThreeDimCoefficients<T>& c) {
  detail::require_zero_diagonal(c);
  return detail::check_sums<T, 3>({{{T(c.a2 * c.a2 * c.b1), T(c.a3 * c.a3 * c.c1)},
                                    {T(c.b1 * c.b1 * c.a2), T(c.b3 * c.b3 * c.c2)},
                                    {T(c.c1 * c.c1 * c.a3), T(c.c2 * c.c2 * c.b3)}}});
}

/// e_i-coefficient of e_i^[4] vanishes:
///   a3^4 c2^2 b1 + a2^4 b3^2 c1, b3^4 c1^2 a2 + b1^4 a3^2 c2, c2^4 b1^2 a3 + c1^4 a2^2 b3.
template <Field T>
IdentityCheck<3> check_fourth_conditions(const ThreeDimCoefficients<T>& c) {
  detail::require_zero_diagonal(c);
  auto p4 = [](const T& x) { return T(x * x * x * x); };
  auto p2 = [](const T& x) { return T(x * x); };
  return detail::check_sums<T, 3>({{{T(p4(c.a3) * p2(c.c2) * c.b1), T(p4(c.a2) * p2(c.b3) * c.c1)},
                                    {T(p4(c.b3) * p2(c.c1) * c.a2), T(p4(c.b1) * p2(c.a3) * c.c2)},
                                    {T(p4(c.c2) * p2(c.b1) * c.a3), T(p4(c.c1) * p2(c.a2) * c.b3)}}});
}

/// Consequences of the cube conditions when all six coefficients are nonzero:
///   [0] b3^2 c1^3 + b1^3 c2^2,  [1] a3^2 c2^3 + a2^3 c1^2,  [2] a2^2 b3^3 + a3^3 b1^2.
template <Field T>
IdentityCheck<3> check_derived_identities(const ThreeDimCoefficients<T>& c) {
  detail::require_zero_diagonal(c);
  auto p3 = [](const T& x) { return T(x * x * x); };
  auto p2 = [](const T& x) { return T(x * x); };
  return detail::check_sums<T, 3>({{{T(p2(c.b3) * p3(c.c1)), T(p3(c.b1) * p2(c.c2))},
                                    {T(p2(c.a3) * p3(c.c2)), T(p3(c.a2) * p2(c.c1))},
                                    {T(p2(c.a2) * p3(c.b3)), T(p3(c.a3) * p2(c.b1))}}});
}

// ---------------------------------------------------------------------------

template <Field T>
struct ZeroCaseResult {
  int proof_case = 0;                 // 1, 2 or 3
  std::vector<std::size_t> relabel;   // new e'_j = old e_{relabel[j]} (composite)
  T a2{0}, a3{0}, b3{0};              // target: e1 e1 = a2 e2 + a3 e3, e2 e2 = b3 e3
  ChangeOfBasis<T> witness;
  double residual = 0.0;

  EvolutionAlgebra<T> target() const {
    return ThreeDimCoefficients<T>::off_diagonal(a2, a3, T(0), b3, T(0), T(0)).algebra();
  }
};

/// Zero-diagonal algebras with infinite generator periods and some vanishing off-diagonal
/// coefficient are basis relabelings of e1 e1 = a2 e2 + a3 e3, e2 e2 = b3 e3.
template <Field T>
ZeroCaseResult<T> classify_3d_zero_case(const ThreeDimCoefficients<T>& c) {
  detail::require_zero_diagonal(c);
  if (!check_cube_conditions(c).all())
    throw PreconditionFailed("the e_i-coefficients of e_i^[3] do not all vanish");
  if (!check_fourth_conditions(c).all())
    throw PreconditionFailed("the e_i-coefficients of e_i^[4] do not all vanish");
  if (c.all_off_diagonal_nonzero()) throw PreconditionFailed("no off-diagonal coefficient vanishes");

  // Move a vanishing coefficient into the b1 slot (the e1-coefficient of e2 e2).
  const auto e = c.algebra();
  const auto& a = e.structure();
  std::vector<std::size_t> first{0, 1, 2};
  if (a(1, 0) != T(0)) {
    bool found = false;
    for (std::size_t i = 0; i < 3 && !found; ++i)
      for (std::size_t j = 0; j < 3 && !found; ++j)
        if (i != j && a(i, j) == T(0)) {
          first = {j, i, 3 - i - j};
          found = true;
        }
  }
  const auto step1 = ChangeOfBasis<T>::from_matrix(relabeling_matrix<T>(first));
  const auto d = ThreeDimCoefficients<T>::from_algebra(apply_change_of_basis(e, step1).algebra);

  ZeroCaseResult<T> out;
  std::vector<std::size_t> second{0, 1, 2};
  if (d.a3 == T(0) && d.b3 == T(0)) {
    out.proof_case = 1;
    second = {2, 0, 1};
  } else if (d.a3 == T(0)) {
    out.proof_case = 2;
    if (d.a2 == T(0)) second = {1, 2, 0};
  } else {
    out.proof_case = 3;
    if (d.b3 == T(0)) second = {0, 2, 1};
  }
  out.witness = step1.then(ChangeOfBasis<T>::from_matrix(relabeling_matrix<T>(second)));
  for (std::size_t k = 0; k < 3; ++k) out.relabel.push_back(first[second[k]]);

  const auto t = apply_change_of_basis(e, out.witness);
  const auto r = ThreeDimCoefficients<T>::from_algebra(t.algebra);
  out.a2 = r.a2;
  out.a3 = r.a3;
  out.b3 = r.b3;
  out.residual = isomorphism_residual(e, out.witness, out.target());
  const bool shape = field_traits<T>::exact ? out.residual == 0.0 : out.residual < 1e-12;
  if (!shape) throw PreconditionFailed("relabeled table is not of the form e1e1 = a2e2 + a3e3, e2e2 = b3e3");
  return out;
}

// ---------------------------------------------------------------------------

template <Field T>
struct RecurrenceState {
  std::size_t k = 0;
  T A2{0}, A3{0}, B1{0}, B3{0}, C1{0}, C2{0};
  std::array<bool, 3> side_conditions{true, true, true};  // checked on the state k-1 (k >= 3)
  bool matches_plenary = false;
  double plenary_residual = 0.0;
  bool pass() const { return matches_plenary && side_conditions[0] && side_conditions[1] && side_conditions[2]; }
};

/// Iterates
///   A_{k,2} = A_{k-1,3}^2 c2, A_{k,3} = A_{k-1,2}^2 b3 (and the analogous B, C rows)
/// from A_{2,2} = a2, A_{2,3} = a3, ... and compares e_1^[k] = A_{k,2} e2 + A_{k,3} e3 etc. with
/// directly computed plenary powers. Side conditions at k:
///   A_{k-1,2}^2 b1 + A_{k-1,3}^2 c1 = 0, B_{k-1,1}^2 a2 + B_{k-1,3}^2 c2 = 0, C_{k-1,1}^2 a3 + C_{k-1,2}^2 b3 = 0.
template <Field T>
std::vector<RecurrenceState<T>> verify_recurrences(const ThreeDimCoefficients<T>& c, std::size_t depth) {
  detail::require_zero_diagonal(c);
  if (!c.all_off_diagonal_nonzero()) throw PreconditionFailed("all six off-diagonal coefficients must be nonzero");
  if (depth < 2) throw PreconditionFailed("depth K must be >= 2");
  const auto e = c.algebra();

  std::vector<RecurrenceState<T>> states;
  RecurrenceState<T> s;
  s.k = 2;
  s.A2 = c.a2; s.A3 = c.a3;
  s.B1 = c.b1; s.B3 = c.b3;
  s.C1 = c.c1; s.C2 = c.c2;
  std::array<Element<T>, 3> power{Element<T>::basis(3, 0), Element<T>::basis(3, 1), Element<T>::basis(3, 2)};

  for (std::size_t k = 2; k <= depth; ++k) {
    if (k > 2) {
      const RecurrenceState<T>& p = states.back();
      s = RecurrenceState<T>{};
      s.k = k;
      s.A2 = p.A3 * p.A3 * c.c2; s.A3 = p.A2 * p.A2 * c.b3;
      s.B1 = p.B3 * p.B3 * c.c1; s.B3 = p.B1 * p.B1 * c.a3;
      s.C1 = p.C2 * p.C2 * c.b1; s.C2 = p.C1 * p.C1 * c.a2;
      s.side_conditions = {detail::sum_vanishes(T(p.A2 * p.A2 * c.b1), T(p.A3 * p.A3 * c.c1)).first,
                           detail::sum_vanishes(T(p.B1 * p.B1 * c.a2), T(p.B3 * p.B3 * c.c2)).first,
                           detail::sum_vanishes(T(p.C1 * p.C1 * c.a3), T(p.C2 * p.C2 * c.b3)).first};
    }
    for (auto& x : power) x = square(e, x);
    const std::array<std::vector<T>, 3> predicted{std::vector<T>{T(0), s.A2, s.A3},
                                                  std::vector<T>{s.B1, T(0), s.B3},
                                                  std::vector<T>{s.C1, s.C2, T(0)}};
    bool ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      if constexpr (field_traits<T>::exact) {
        ok = ok && predicted[i] == power[i].coords;
        if (predicted[i] != power[i].coords) worst = std::max(worst, 1.0);
      } else {
        const double scale = std::max(max_abs(predicted[i]), power[i].norm_inf());
        double diff = 0.0;
        for (std::size_t q = 0; q < 3; ++q) diff = std::max(diff, std::abs(predicted[i][q] - power[i][q]));
        const double rel = scale > 0.0 ? diff / scale : 0.0;
        worst = std::max(worst, rel);
        ok = ok && rel < 1e-9;
      }
    }
    s.matches_plenary = ok;
    s.plenary_residual = worst;
    states.push_back(s);
  }
  return states;
}

enum class EquivalenceVerdict { Agree, Inconclusive, Critical };

inline const char* to_string(EquivalenceVerdict v) {
  switch (v) {
    case EquivalenceVerdict::Agree: return "agree";
    case EquivalenceVerdict::Inconclusive: return "inconclusive";
    case EquivalenceVerdict::Critical: return "CRITICAL";
  }
  return "?";
}

struct EquivalenceReport {
  bool cube_conditions = false;      // algebraic side
  bool infinite_up_to_depth = false;  // all three recurrence sets empty
  bool partial = false;
  std::array<PeriodReport, 3> periods;
  EquivalenceVerdict verdict = EquivalenceVerdict::Inconclusive;
};

/// With a2 a3 b1 b3 c1 c2 != 0: every generator has infinite period iff the cube conditions hold.
/// Compares both sides at depth K. Cube conditions with a recurrence is CRITICAL; failing
/// conditions with no recurrence seen yet is inconclusive.
template <Field T>
EquivalenceReport infinite_period_equivalence_test(const ThreeDimCoefficients<T>& c, std::size_t depth = kDefaultDepth,
                                                   std::size_t bit_cap = kDefaultBitCap) {
  detail::require_zero_diagonal(c);
  if (!c.all_off_diagonal_nonzero()) throw PreconditionFailed("all six off-diagonal coefficients must be nonzero");
  EquivalenceReport r;
  r.cube_conditions = check_cube_conditions(c).all();
  const auto e = c.algebra();
  r.infinite_up_to_depth = true;
  for (std::size_t j = 0; j < 3; ++j) {
    r.periods[j] = recurrence_report(e, j, depth, bit_cap);
    r.infinite_up_to_depth = r.infinite_up_to_depth && r.periods[j].infinite_up_to_depth;
    r.partial = r.partial || r.periods[j].partial;
  }
  if (r.cube_conditions == r.infinite_up_to_depth)
    r.verdict = EquivalenceVerdict::Agree;
  else if (r.cube_conditions)
    r.verdict = EquivalenceVerdict::Critical;
  else
    r.verdict = EquivalenceVerdict::Inconclusive;
  return r;
}

}  // namespace evokit
