#include <gtest/gtest.h>

#include <numeric>

#include "evokit/permutation.hpp"
#include "oracles.hpp"

using namespace evokit;
using R = Rational;

namespace {

std::vector<std::string> labels(const std::vector<Component>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.label());
  return out;
}

Permutation one_based(std::vector<std::size_t> img) { return Permutation::from_one_based(img); }

}  // namespace

TEST(Cycles, Examples) {
  EXPECT_EQ(cycle_decomposition(Permutation::identity(3)).cycles.size(), 3u);
  EXPECT_EQ(cycle_decomposition(one_based({2, 1, 4, 3})).str(), "(1 2)(3 4)");
  EXPECT_EQ(cycle_decomposition(one_based({2, 3, 4, 1})).str(), "(1 2 3 4)");
  EXPECT_EQ(cycle_decomposition(one_based({3, 1, 2, 4})).str(), "(1 3 2)(4)");
  EXPECT_THROW(one_based({1, 1, 2}), InvalidParameters);
  EXPECT_THROW(one_based({0, 1}), InvalidParameters);
}

TEST(Cycles, DisjointAndCovering) {
  oracle::Gen g(1);
  for (int t = 0; t < 50; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(1, 8));
    const Permutation p(g.permutation(n));
    const auto d = cycle_decomposition(p);
    std::vector<std::size_t> all;
    for (const auto& c : d.cycles) {
      EXPECT_EQ(c.front(), *std::min_element(c.begin(), c.end()));
      for (std::size_t s = 0; s < c.size(); ++s) EXPECT_EQ(p(c[s]), c[(s + 1) % c.size()]);
      all.insert(all.end(), c.begin(), c.end());
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(n);
    std::iota(expect.begin(), expect.end(), 0);
    EXPECT_EQ(all, expect);
    const auto type = d.cycle_type();
    EXPECT_TRUE(std::is_sorted(type.rbegin(), type.rend()));
  }
}

TEST(Conjugacy, Examples) {
  const auto p12 = Permutation::from_cycles(3, {{0, 1}});
  const auto p23 = Permutation::from_cycles(3, {{1, 2}});
  const auto p123 = Permutation::from_cycles(3, {{0, 1, 2}});
  auto g = conjugate_in_Sn(p12, p23);
  ASSERT_TRUE(g);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ((*g)(p12(i)), p23((*g)(i)));
  EXPECT_FALSE(conjugate_in_Sn(p123, p12));
  auto self = conjugate_in_Sn(p123, p123);
  ASSERT_TRUE(self);
  EXPECT_EQ(*self, Permutation::identity(3));
}

TEST(Conjugacy, IffSameCycleType) {
  oracle::Gen g(2);
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(1, 6));
    const Permutation p(g.permutation(n)), q(g.permutation(n));
    const auto w = conjugate_in_Sn(p, q);
    EXPECT_EQ(w.has_value(), cycle_decomposition(p).cycle_type() == cycle_decomposition(q).cycle_type());
    if (w) {
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ((*w)(p(i)), q((*w)(i)));
    }
  }
}

TEST(ConjugationIsomorphism, Examples) {
  const PermutationAlgebra<R> src(Permutation::from_cycles(3, {{0, 1}}), {R(1), R(1), R(1)});
  const auto id = conjugation_isomorphism(src, Permutation::identity(3));
  EXPECT_EQ(id.witness.forward, Matrix<R>::identity(3));

  const auto c = conjugation_isomorphism(src, Permutation::from_cycles(3, {{0, 2}}));
  EXPECT_EQ(c.target.perm, Permutation::from_cycles(3, {{2, 1}}));
  EXPECT_EQ(isomorphism_residual(src.algebra(), c.witness, c.target.algebra()), 0.0);

  const PermutationAlgebra<R> three(Permutation::from_cycles(3, {{0, 1, 2}}), {R(2), R(3), R(5)});
  const auto c3 = conjugation_isomorphism(three, Permutation::from_cycles(3, {{1, 2}}));
  EXPECT_EQ(c3.target.perm, Permutation::from_cycles(3, {{0, 2, 1}}));
  EXPECT_EQ(isomorphism_residual(three.algebra(), c3.witness, c3.target.algebra()), 0.0);
}

TEST(ConjugationIsomorphism, ExactForRandomInputs) {
  oracle::Gen g(3);
  for (int t = 0; t < 60; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(1, 6));
    std::vector<R> a(n);
    for (auto& x : a) x = g.rational();
    const PermutationAlgebra<R> src(Permutation(g.permutation(n)), a);
    const Permutation h(g.permutation(n));
    const auto c = conjugation_isomorphism(src, h);
    EXPECT_EQ(c.target.perm, h * src.perm * h.inverse());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(c.target.coeffs[h(i)], a[i]);
    EXPECT_EQ(isomorphism_residual(src.algebra(), c.witness, c.target.algebra()), 0.0);
  }
}

TEST(CycScaling, Examples) {
  const auto unit = cyc_scaling_witness<R>({R(1), R(1), R(1)});
  EXPECT_LT(max_abs_diff(unit.forward, Matrix<Complex>::identity(3)), 1e-15);

  const auto w = cyc_scaling_witness<R>({R(1), R(8)});
  EXPECT_NEAR(std::abs(w.forward(0, 0) - 0.5), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(w.forward(1, 1) - 0.25), 0.0, 1e-12);
  const auto cyc2 = PermutationAlgebra<R>(Permutation::from_cycles(2, {{0, 1}}), {R(1), R(8)});
  EXPECT_LT(isomorphism_residual(to_complex(cyc2.algebra()), w, to_complex(cyc_algebra(2))), 1e-12);

  EXPECT_THROW(cyc_scaling_witness<R>({R(1), R(0)}), ZeroCoefficient);
}

TEST(CycScaling, RandomComplexWeights) {
  oracle::Gen g(4);
  for (std::size_t n = 1; n <= 6; ++n)
    for (int t = 0; t < 10; ++t) {
      std::vector<Complex> a(n);
      for (auto& x : a) x = g.complex_in_annulus(0.3, 3.0);
      std::vector<std::size_t> img(n);
      for (std::size_t i = 0; i < n; ++i) img[i] = (i + 1) % n;
      const PermutationAlgebra<Complex> p(Permutation(img), a);
      const auto w = cyc_scaling_witness(a);
      EXPECT_LT(isomorphism_residual(p.algebra(), w, to_complex(cyc_algebra(n))), 1e-8) << "n=" << n;
    }
}

TEST(NilScaling, Examples) {
  EXPECT_EQ(nil_chain_scaling_witness<R>({R(1), R(1)}).forward, Matrix<R>::identity(3));
  const auto w = nil_chain_scaling_witness<R>({R(2), R(3)});
  EXPECT_EQ(w.forward, Matrix<R>::diagonal({R(1), R(2), R(12)}));
  const auto chain = EvolutionAlgebra<R>(Matrix<R>::from_rows({{0, 2, 0}, {0, 0, 3}, {0, 0, 0}}));
  EXPECT_EQ(isomorphism_residual(chain, w, nil_algebra(3)), 0.0);
  EXPECT_EQ(nil_chain_scaling_witness<R>({R(5)}).forward, Matrix<R>::diagonal({R(1), R(5)}));
  EXPECT_THROW(nil_chain_scaling_witness<R>({R(0)}), ZeroCoefficient);
}

TEST(NormalForm, Examples) {
  const PermutationAlgebra<R> p(one_based({2, 1, 4, 3}), {R(1), R(1), R(1), R(0)});
  const auto nf = normal_form(p);
  EXPECT_EQ(labels(nf.components), (std::vector<std::string>{"CYC_2", "NIL_2"}));
  EXPECT_TRUE(nf.exact);
  EXPECT_EQ(nf.residual, 0.0);

  const PermutationAlgebra<R> cyc(one_based({2, 3, 4, 5, 1}), {R(2), R(-1), R(3), R(1, 2), R(7)});
  const auto nc = normal_form(cyc);
  EXPECT_EQ(labels(nc.components), (std::vector<std::string>{"CYC_5"}));
  EXPECT_LT(nc.residual, 1e-8);

  const PermutationAlgebra<R> nil(one_based({2, 3, 4, 5, 1}), {R(2), R(-1), R(0), R(1, 2), R(7)});
  const auto nn = normal_form(nil);
  EXPECT_EQ(labels(nn.components), (std::vector<std::string>{"NIL_5"}));
  EXPECT_TRUE(nn.exact);
  EXPECT_EQ(nn.residual, 0.0);

  const PermutationAlgebra<R> fixed(Permutation::identity(2), {R(3), R(0)});
  EXPECT_EQ(labels(normal_form(fixed).components), (std::vector<std::string>{"CYC_1", "NIL_1"}));
}

TEST(NormalForm, SplitsAtEveryZeroStartingAfterSmallestZero) {
  // cycle (1 2 3 4 5 6) with zeros at positions 2 and 5 (1-based)
  const PermutationAlgebra<R> p(one_based({2, 3, 4, 5, 6, 1}), {R(1), R(0), R(1), R(1), R(0), R(1)});
  const auto nf = normal_form(p);
  EXPECT_EQ(labels(nf.components), (std::vector<std::string>{"NIL_3", "NIL_3"}));
  ASSERT_EQ(nf.blocks.size(), 2u);
  EXPECT_EQ(nf.blocks[0].indices, (std::vector<std::size_t>{2, 3, 4}));
  EXPECT_EQ(nf.blocks[1].indices, (std::vector<std::size_t>{5, 0, 1}));
  EXPECT_EQ(nf.residual, 0.0);
}

TEST(NormalForm, ExactWitnessWhenRadicalsAreRational) {
  // 1 / (a1^2 a2) = 1/8 has a rational cube root
  const PermutationAlgebra<R> p(one_based({2, 1}), {R(1), R(8)});
  const auto nf = normal_form(p);
  EXPECT_TRUE(nf.exact);
  EXPECT_EQ(nf.residual, 0.0);
  const PermutationAlgebra<R> q(one_based({2, 1}), {R(1), R(2)});
  EXPECT_FALSE(normal_form(q).exact);
  EXPECT_LT(normal_form(q).residual, 1e-12);
}

TEST(NormalForm, MatchesPredictionAndIsConjugationInvariant) {
  oracle::Gen g(5);
  for (int t = 0; t < 150; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(1, 7));
    const auto img = g.permutation(n);
    std::vector<R> a(n);
    std::vector<bool> zero(n);
    for (std::size_t i = 0; i < n; ++i) {
      zero[i] = g.coin(0.3);
      a[i] = zero[i] ? R(0) : g.nonzero_rational();
    }
    const PermutationAlgebra<R> p{Permutation(img), a};
    const auto nf = normal_form(p);
    EXPECT_EQ(labels(nf.components), oracle::predicted_components(img, zero));
    EXPECT_EQ(nf.total_size(), n);
    EXPECT_LT(nf.residual, 1e-8);
    if (nf.exact) {
      EXPECT_EQ(nf.residual, 0.0);
    }

    const auto c = conjugation_isomorphism(p, Permutation(g.permutation(n)));
    EXPECT_EQ(labels(normal_form(c.target).components), labels(nf.components));
  }
}

TEST(NormalForm, CycComponentIffNonzeroCycle) {
  oracle::Gen g(6);
  for (int t = 0; t < 80; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(1, 7));
    std::vector<R> a(n);
    for (auto& x : a) x = g.coin(0.25) ? R(0) : g.nonzero_rational();
    const PermutationAlgebra<R> p{Permutation(g.permutation(n)), a};
    std::multiset<std::size_t> full_cycles;
    for (const auto& cyc : cycle_decomposition(p.perm).cycles)
      if (std::all_of(cyc.begin(), cyc.end(), [&](std::size_t i) { return a[i] != 0; })) full_cycles.insert(cyc.size());
    std::multiset<std::size_t> cyc_components;
    for (const auto& c : normal_form(p).components)
      if (c.kind == ComponentKind::cyclic) cyc_components.insert(c.size);
    EXPECT_EQ(cyc_components, full_cycles);
  }
}

TEST(NormalForm, WitnessCarriesCanonicalTable) {
  oracle::Gen g(7);
  for (int t = 0; t < 20; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(2, 5));
    std::vector<Complex> a(n);
    for (auto& x : a) x = g.coin(0.2) ? Complex(0) : g.complex_in_annulus();
    const PermutationAlgebra<Complex> p{Permutation(g.permutation(n)), a};
    const auto nf = normal_form(p);
    const auto& w = std::get<ChangeOfBasis<Complex>>(nf.witness);
    EXPECT_LT(isomorphism_residual(p.algebra(), w, nf.canonical()), 1e-8);
  }
}
