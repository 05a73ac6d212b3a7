#pragma once

// Evolution algebras of permutations, e_i e_i = a_i e_{pi(i)}, and their
// normal form as a direct sum of cyclic algebras CYC_p (e_i e_i = e_{i+1},
// e_p e_p = e_1) and nilpotent chains NIL_k (e_i e_i = e_{i+1}, e_k e_k = 0).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "evokit/algebra.hpp"

namespace evokit {

/// Bijection on {0..n-1}. Text and file formats use 1-based images.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (auto v : image_) {
      if (v >= image_.size() || seen[v]) throw InvalidParameters("permutation image is not a bijection");
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> img(n);
    for (std::size_t i = 0; i < n; ++i) img[i] = i;
    return Permutation(std::move(img));
  }

  static Permutation from_one_based(const std::vector<std::size_t>& image) {
    std::vector<std::size_t> img;
    img.reserve(image.size());
    for (auto v : image) {
      if (v == 0) throw InvalidParameters("permutation images are 1-based");
      img.push_back(v - 1);
    }
    return Permutation(std::move(img));
  }

  /// Product of the given (0-based) cycles on {0..n-1}.
  static Permutation from_cycles(std::size_t n, const std::vector<std::vector<std::size_t>>& cycles) {
    auto p = identity(n);
    for (const auto& c : cycles)
      for (std::size_t t = 0; t < c.size(); ++t) p.image_.at(c[t]) = c[(t + 1) % c.size()];
    return Permutation(p.image_);
  }

  std::size_t size() const noexcept { return image_.size(); }
  std::size_t operator()(std::size_t i) const { return image_.at(i); }
  const std::vector<std::size_t>& image() const noexcept { return image_; }

  std::vector<std::size_t> one_based() const {
    std::vector<std::size_t> out(image_);
    for (auto& v : out) ++v;
    return out;
  }

  Permutation inverse() const {
    std::vector<std::size_t> inv(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = i;
    return Permutation(std::move(inv));
  }

  /// (p * q)(i) = p(q(i))
  friend Permutation operator*(const Permutation& p, const Permutation& q) {
    if (p.size() != q.size()) throw DimensionMismatch("composing permutations of different degree");
    std::vector<std::size_t> img(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) img[i] = p(q(i));
    return Permutation(std::move(img));
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> image_;
};

/// Disjoint cycles, each rotated to start at its minimum, sorted by that minimum.
/// Fixed points appear as 1-cycles.
struct CycleDecomposition {
  std::vector<std::vector<std::size_t>> cycles;

  /// Multiset of cycle lengths, sorted decreasingly.
  std::vector<std::size_t> cycle_type() const {
    std::vector<std::size_t> t;
    for (const auto& c : cycles) t.push_back(c.size());
    std::sort(t.rbegin(), t.rend());
    return t;
  }

  std::string str() const {
    std::string out;
    for (const auto& c : cycles) {
      out += "(";
      for (std::size_t t = 0; t < c.size(); ++t) out += (t ? " " : "") + std::to_string(c[t] + 1);
      out += ")";
    }
    return out;
  }
};

inline CycleDecomposition cycle_decomposition(const Permutation& p) {
  CycleDecomposition d;
  std::vector<bool> seen(p.size(), false);
  for (std::size_t start = 0; start < p.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> cycle;
    for (std::size_t i = start; !seen[i]; i = p(i)) {
      seen[i] = true;
      cycle.push_back(i);
    }
    d.cycles.push_back(std::move(cycle));  // starts at its minimum since starts ascend
  }
  return d;
}

/// If p and q are conjugate, returns g with g(p(i)) = q(g(i)) for all i.
inline std::optional<Permutation> conjugate_in_Sn(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw DimensionMismatch("permutations of different degree");
  auto cp = cycle_decomposition(p).cycles;
  auto cq = cycle_decomposition(q).cycles;
  auto by_length = [](const auto& a, const auto& b) { return a.size() > b.size(); };
  std::stable_sort(cp.begin(), cp.end(), by_length);
  std::stable_sort(cq.begin(), cq.end(), by_length);
  if (cp.size() != cq.size()) return std::nullopt;
  std::vector<std::size_t> g(p.size());
  for (std::size_t c = 0; c < cp.size(); ++c) {
    if (cp[c].size() != cq[c].size()) return std::nullopt;
    for (std::size_t t = 0; t < cp[c].size(); ++t) g[cp[c][t]] = cq[c][t];
  }
  return Permutation(std::move(g));
}

// ---------------------------------------------------------------------------

template <Field T>
struct PermutationAlgebra {
  Permutation perm;
  std::vector<T> coeffs;

  PermutationAlgebra(Permutation p, std::vector<T> a) : perm(std::move(p)), coeffs(std::move(a)) {
    if (coeffs.size() != perm.size()) throw DimensionMismatch("need one coefficient per basis vector");
    if (perm.size() == 0) throw DimensionMismatch("empty permutation algebra");
  }

  std::size_t dim() const noexcept { return perm.size(); }

  /// Row i = a_i times the unit vector at pi(i).
  EvolutionAlgebra<T> algebra() const {
    Matrix<T> a(dim(), dim());
    for (std::size_t i = 0; i < dim(); ++i) a(i, perm(i)) = coeffs[i];
    return EvolutionAlgebra<T>(std::move(a));
  }
};

template <Field T>
struct ConjugatedAlgebra {
  PermutationAlgebra<T> target;
  ChangeOfBasis<T> witness;  // basis of the source algebra carrying the target's table
};

/// f(e_i) = e_{g(i)} maps E_{pi}(a) onto E_{g pi g^-1}(a') with a'_{g(i)} = a_i.
template <Field T>
ConjugatedAlgebra<T> conjugation_isomorphism(const PermutationAlgebra<T>& source, const Permutation& g) {
  const std::size_t n = source.dim();
  if (g.size() != n) throw DimensionMismatch("conjugating permutation has the wrong degree");
  const Permutation ginv = g.inverse();
  Permutation target_perm = g * source.perm * ginv;
  std::vector<T> target_coeffs(n);
  for (std::size_t i = 0; i < n; ++i) target_coeffs[g(i)] = source.coeffs[i];
  // New basis vector j is f^{-1}(e_j) = e_{g^{-1}(j)}.
  return {PermutationAlgebra<T>(std::move(target_perm), std::move(target_coeffs)),
          ChangeOfBasis<T>::from_matrix(relabeling_matrix<T>(ginv.image()))};
}

// ---------------------------------------------------------------------------
// Diagonal scalings.

namespace detail {

template <Field T>
void require_nonzero(const std::vector<T>& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] == T(0)) throw ZeroCoefficient(i);
}

/// Principal m-th root of 1 / (((w_0^2 w_1)^2 w_2)^2 ... w_{t-1}), computed in log/angle form.
inline Complex principal_cyc_root(const std::vector<Complex>& w) {
  const double two_pi = 2.0 * std::numbers::pi;
  double log_mod = 0.0;
  double angle = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) {
    if (s > 0) {
      log_mod *= 2.0;
      angle = std::fmod(2.0 * angle, two_pi);
    }
    log_mod += std::log(std::abs(w[s]));
    angle = std::fmod(angle + std::arg(w[s]), two_pi);
  }
  // principal argument of the product
  if (angle > std::numbers::pi) angle -= two_pi;
  if (angle <= -std::numbers::pi) angle += two_pi;
  const double m = std::ldexp(1.0, static_cast<int>(w.size())) - 1.0;
  return std::exp(Complex(-log_mod, -angle) / m);
}

/// Exact counterpart for rational weights, when the radical is rational.
inline std::optional<Rational> exact_cyc_root(const std::vector<Rational>& w) {
  if (w.size() > 24) return std::nullopt;
  Rational prod = 1;
  for (std::size_t s = 0; s < w.size(); ++s) {
    if (s > 0) prod *= prod;
    prod *= w[s];
  }
  const unsigned m = (1u << w.size()) - 1u;
  return exact_root(Rational(1 / prod), m);
}

/// Diagonal entries d with d_{s+1} = d_s^2 w_s, starting from d_0.
template <Field T>
std::vector<T> chain_scaling(const T& first, const std::vector<T>& w, std::size_t count) {
  std::vector<T> d(count);
  d[0] = first;
  for (std::size_t s = 0; s + 1 < count; ++s) d[s + 1] = d[s] * d[s] * w[s];
  return d;
}

}  // namespace detail

/// Scaling e'_i = A_i e_i of the weighted cycle e_i e_i = a_i e_{i+1} (indices mod n) onto CYC_n.
/// A_1 is the principal (2^n - 1)-th root from the closed form; the rest follow from A_{i+1} = A_i^2 a_i.
template <Field T>
ChangeOfBasis<Complex> cyc_scaling_witness(const std::vector<T>& a) {
  if (a.empty()) throw DimensionMismatch("empty weight vector");
  detail::require_nonzero(a);
  std::vector<Complex> w;
  for (const auto& x : a) w.push_back(to_complex(x));
  const Complex first = detail::principal_cyc_root(w);
  return ChangeOfBasis<Complex>::from_matrix(Matrix<Complex>::diagonal(detail::chain_scaling(first, w, w.size())));
}

/// Scaling of the weighted chain e_i e_i = a_i e_{i+1} (i < k), e_k e_k = 0, onto NIL_k; k = a.size() + 1.
template <Field T>
ChangeOfBasis<T> nil_chain_scaling_witness(const std::vector<T>& a) {
  detail::require_nonzero(a);
  return ChangeOfBasis<T>::from_matrix(Matrix<T>::diagonal(detail::chain_scaling(T(1), a, a.size() + 1)));
}

// ---------------------------------------------------------------------------

enum class ComponentKind { cyclic, nil };

struct Component {
  ComponentKind kind;
  std::size_t size;

  std::string label() const { return (kind == ComponentKind::cyclic ? "CYC_" : "NIL_") + std::to_string(size); }
  friend bool operator==(const Component&, const Component&) = default;
};

/// CYC components by decreasing size, then NIL components by decreasing size.
inline bool canonical_component_order(const Component& x, const Component& y) {
  if (x.kind != y.kind) return x.kind == ComponentKind::cyclic;
  return x.size > y.size;
}

/// Structure matrix of the direct sum of the listed components, in order.
template <Field T>
EvolutionAlgebra<T> direct_sum_algebra(const std::vector<Component>& parts) {
  std::size_t n = 0;
  for (const auto& c : parts) n += c.size;
  Matrix<T> a(n, n);
  std::size_t offset = 0;
  for (const auto& c : parts) {
    for (std::size_t s = 0; s + 1 < c.size; ++s) a(offset + s, offset + s + 1) = T(1);
    if (c.kind == ComponentKind::cyclic) a(offset + c.size - 1, offset) = T(1);
    offset += c.size;
  }
  return EvolutionAlgebra<T>(std::move(a));
}

inline EvolutionAlgebra<Rational> cyc_algebra(std::size_t n) {
  return direct_sum_algebra<Rational>({{ComponentKind::cyclic, n}});
}
inline EvolutionAlgebra<Rational> nil_algebra(std::size_t k) {
  return direct_sum_algebra<Rational>({{ComponentKind::nil, k}});
}

/// One summand before scaling: basis indices in chain order and the weights a_{m_s}.
struct ComponentBlock {
  Component component;
  std::vector<std::size_t> indices;
};

template <Field T>
struct NormalFormReport {
  std::vector<Component> components;  // canonical order
  std::vector<ComponentBlock> blocks;  // same order, with the original basis indices
  std::variant<ChangeOfBasis<Rational>, ChangeOfBasis<Complex>> witness;
  double residual = 0.0;  // vs. the canonical direct-sum table
  bool exact = false;

  EvolutionAlgebra<T> canonical() const { return direct_sum_algebra<T>(components); }
  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.size;
    return n;
  }
};

namespace detail {

/// Splits every cycle into CYC / NIL blocks. Cycles containing zero coefficients
/// are cut after each zero; the walk starts right after the zero with the smallest index.
template <Field T>
std::vector<ComponentBlock> component_blocks(const PermutationAlgebra<T>& p) {
  std::vector<ComponentBlock> blocks;
  for (const auto& cycle : cycle_decomposition(p.perm).cycles) {
    const std::size_t len = cycle.size();
    std::optional<std::size_t> first_zero;  // position in `cycle`
    for (std::size_t t = 0; t < len; ++t)
      if (p.coeffs[cycle[t]] == T(0) && (!first_zero || cycle[t] < cycle[*first_zero])) first_zero = t;
    if (!first_zero) {
      blocks.push_back({{ComponentKind::cyclic, len}, cycle});
      continue;
    }
    std::vector<std::size_t> seg;
    for (std::size_t step = 1; step <= len; ++step) {
      const std::size_t idx = cycle[(*first_zero + step) % len];
      seg.push_back(idx);
      if (p.coeffs[idx] == T(0)) {
        blocks.push_back({{ComponentKind::nil, seg.size()}, seg});
        seg.clear();
      }
    }
  }
  std::stable_sort(blocks.begin(), blocks.end(), [](const ComponentBlock& x, const ComponentBlock& y) {
    return canonical_component_order(x.component, y.component);
  });
  return blocks;
}

/// Assembles the block-diagonal scaling; `cyc_first` yields A_1 for a cyclic block or nothing.
template <Field U, Field T, class CycFirst>
std::optional<Matrix<U>> assemble_witness(const PermutationAlgebra<T>& p, const std::vector<ComponentBlock>& blocks,
                                          CycFirst cyc_first, auto convert) {
  const std::size_t n = p.dim();
  Matrix<U> w(n, n);
  std::size_t row = 0;
  for (const auto& b : blocks) {
    std::vector<U> weights;
    for (auto idx : b.indices) weights.push_back(convert(p.coeffs[idx]));
    std::vector<U> scale;
    if (b.component.kind == ComponentKind::cyclic) {
      std::optional<U> first = cyc_first(weights);
      if (!first) return std::nullopt;
      scale = chain_scaling(*first, weights, weights.size());
    } else {
      scale = chain_scaling(U(1), weights, weights.size());
    }
    for (std::size_t s = 0; s < b.indices.size(); ++s) w(row + s, b.indices[s]) = scale[s];
    row += b.indices.size();
  }
  return w;
}

}  // namespace detail

/// Normal form of a permutation evolution algebra with a verified change of basis onto
/// the canonical direct sum. Rational input keeps an exact witness when every radical is rational.
template <Field T>
NormalFormReport<T> normal_form(const PermutationAlgebra<T>& p) {
  NormalFormReport<T> report{.components = {}, .blocks = detail::component_blocks(p),
                             .witness = ChangeOfBasis<Complex>{}, .residual = 0.0, .exact = false};
  for (const auto& b : report.blocks) report.components.push_back(b.component);

  if constexpr (std::is_same_v<T, Rational>) {
    auto w = detail::assemble_witness<Rational>(
        p, report.blocks, [](const std::vector<Rational>& wt) { return detail::exact_cyc_root(wt); },
        [](const Rational& x) { return x; });
    if (w) {
      auto cb = ChangeOfBasis<Rational>::from_matrix(std::move(*w));
      report.residual = isomorphism_residual(p.algebra(), cb, direct_sum_algebra<Rational>(report.components));
      report.witness = std::move(cb);
      report.exact = true;
      return report;
    }
  }
  auto w = detail::assemble_witness<Complex>(
      p, report.blocks,
      [](const std::vector<Complex>& wt) { return std::optional<Complex>(detail::principal_cyc_root(wt)); },
      [](const T& x) { return to_complex(x); });
  auto cb = ChangeOfBasis<Complex>::from_matrix(std::move(*w));
  report.residual =
      isomorphism_residual(to_complex(p.algebra()), cb, direct_sum_algebra<Complex>(report.components));
  report.witness = std::move(cb);
  report.exact = false;
  return report;
}

}  // namespace evokit
