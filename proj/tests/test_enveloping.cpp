#include <gtest/gtest.h>

#include "evokit/enveloping.hpp"
#include "oracles.hpp"

using namespace evokit;
using R = Rational;

namespace {

EvolutionAlgebra<R> alg(const std::vector<std::vector<R>>& rows) { return EvolutionAlgebra<R>(Matrix<R>::from_rows(rows)); }

std::vector<std::pair<std::string, CatalogEntry<R>>> all_catalog_cases() {
  return {
      {"E1", catalog_2d<R>(Class2D::E1)},
      {"E2", catalog_2d<R>(Class2D::E2)},
      {"E3", catalog_2d<R>(Class2D::E3)},
      {"E4", catalog_2d<R>(Class2D::E4)},
      {"E5(0,0)", catalog_2d<R>(Class2D::E5, {R(0), R(0)})},
      {"E5 one zero", catalog_2d<R>(Class2D::E5, {R(2), R(0)})},
      {"E5 one zero", catalog_2d<R>(Class2D::E5, {R(0), R(-3, 2)})},
      {"E5 generic", catalog_2d<R>(Class2D::E5, {R(2), R(5)})},
      {"E6", catalog_2d<R>(Class2D::E6, {R(0)})},
      {"E6", catalog_2d<R>(Class2D::E6, {R(7, 3)})},
  };
}

}  // namespace

TEST(GeneratorProduct, Examples) {
  const auto e1 = two_dim_algebra<R>(Class2D::E1);
  EXPECT_EQ(generator_product(e1, 0, 0), Matrix<R>::unit(2, 0, 0));
  const auto e2 = two_dim_algebra<R>(Class2D::E2);
  EXPECT_EQ(generator_product(e2, 1, 0), Matrix<R>::unit(2, 1, 0));
  EXPECT_EQ(generator_product(e2, 1, 0), right_mult_matrix(e2, Element<R>::basis(2, 1)));
  EXPECT_TRUE(generator_product(e2, 0, 1).is_zero());
  EXPECT_THROW(generator_product(e2, 2, 0), InvalidParameters);
}

TEST(GeneratorProduct, EqualsMatrixProductOfGenerators) {
  oracle::Gen g(31);
  for (int t = 0; t < 30; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(1, 4));
    const EvolutionAlgebra<R> e(g.rational_matrix(n, n, 3));
    const auto gens = generators(e);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(generator_product(e, i, j), Matrix<R>(gens[i] * gens[j]));
  }
}

TEST(Closure, Examples) {
  EXPECT_EQ(enveloping_closure(two_dim_algebra<R>(Class2D::E5, {R(2), R(3)})).dim, 4u);
  const auto e4 = enveloping_closure(two_dim_algebra<R>(Class2D::E4));
  EXPECT_EQ(e4.dim, 1u);
  EXPECT_EQ(e4.sum_ranks, 0u);
  EXPECT_FALSE(e4.formula_agrees);
  const auto zero = enveloping_closure(EvolutionAlgebra<R>::zero(3));
  EXPECT_EQ(zero.dim, 0u);
  EXPECT_TRUE(zero.formula_agrees);
}

TEST(Closure, BasisIsClosedAndIndependent) {
  oracle::Gen g(32);
  for (int t = 0; t < 30; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(1, 4));
    auto m = g.rational_matrix(n, n, 2);
    const auto rep = enveloping_closure(EvolutionAlgebra<R>(m));
    EXPECT_LE(rep.dim, n * n);
    SpanBasis<R> span(n * n);
    for (const auto& b : rep.basis) EXPECT_TRUE(span.insert(b.data()));
    for (const auto& x : rep.basis)
      for (const auto& y : rep.basis) EXPECT_TRUE(span.coordinates(Matrix<R>(x * y).data()).has_value());
    EXPECT_EQ(rep.closure_residual, 0.0);
    // every generator lies in M(E)
    for (const auto& gen : generators(EvolutionAlgebra<R>(m))) EXPECT_TRUE(span.coordinates(gen.data()).has_value());
  }
}

TEST(Closure, StructureConstantsReproduceProducts) {
  const auto rep = enveloping_closure(two_dim_algebra<R>(Class2D::E3));
  const std::size_t d = rep.dim;
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = 0; q < d; ++q) {
      Matrix<R> sum(2, 2);
      for (std::size_t r = 0; r < d; ++r) sum = sum + rep.basis[r] * rep.assoc_constants(p, q, r);
      EXPECT_EQ(sum, Matrix<R>(rep.basis[p] * rep.basis[q]));
    }
}

TEST(Closure, DimensionInvariantUnderRelabeling) {
  oracle::Gen g(33);
  for (int t = 0; t < 30; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(2, 4));
    auto m = g.rational_matrix(n, n, 2);
    const EvolutionAlgebra<R> e(m);
    const auto cb = ChangeOfBasis<R>::from_matrix(relabeling_matrix<R>(g.permutation(n)));
    const auto f = apply_change_of_basis(e, cb).algebra;
    EXPECT_EQ(enveloping_closure(e).dim, enveloping_closure(f).dim);
  }
}

TEST(Closure, RowRankFormulaOnFullySupportedAlgebras) {
  oracle::Gen g(34);
  for (int t = 0; t < 40; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(1, 4));
    const EvolutionAlgebra<Complex> e(g.complex_matrix(n, n));
    EXPECT_TRUE(enveloping_closure(e).formula_agrees);
    Matrix<R> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) m(i, k) = g.nonzero_rational();
    EXPECT_TRUE(enveloping_closure(EvolutionAlgebra<R>(m)).formula_agrees);
  }
}

TEST(Closure, ComplexMatchesRational) {
  oracle::Gen g(35);
  for (int t = 0; t < 30; ++t) {
    const auto n = static_cast<std::size_t>(g.integer(1, 4));
    auto m = g.rational_matrix(n, n, 2);
    const EvolutionAlgebra<R> e(m);
    const auto exact = enveloping_closure(e);
    const auto approx = enveloping_closure(to_complex(e));
    EXPECT_EQ(exact.dim, approx.dim);
    EXPECT_EQ(exact.per_row_ranks, approx.per_row_ranks);
    EXPECT_LT(approx.closure_residual, 1e-9);
  }
}

TEST(Catalog, Examples) {
  const auto e1 = catalog_2d<R>(Class2D::E1);
  EXPECT_EQ(e1.dim, 1u);
  EXPECT_EQ(e1.table(0, 0, 0), 1);
  const auto e5 = catalog_2d<R>(Class2D::E5, {R(2), R(0)});
  EXPECT_EQ(e5.dim, 3u);
  for (const auto& b : e5.named_basis) EXPECT_EQ(b(1, 0), 0);
  const auto e3 = catalog_2d<R>(Class2D::E3);
  EXPECT_EQ(e3.table(0, 0, 0), 1);
  EXPECT_EQ(e3.table(0, 1, 0), -1);
  EXPECT_EQ(e3.table(1, 0, 1), 1);
  EXPECT_EQ(e3.table(1, 1, 1), -1);
  EXPECT_THROW(catalog_2d<R>(Class2D::Abelian), InvalidParameters);
  EXPECT_THROW(catalog_2d<R>(Class2D::E5, {R(1), R(1)}), InvalidParameters);
}

TEST(Catalog, DimensionsMatchExpected) {
  for (const auto& [kind, entry] : all_catalog_cases()) EXPECT_EQ(entry.dim, oracle::catalog_dims().at(kind)) << kind;
}

TEST(Catalog, AgreesWithClosureExactly) {
  for (const auto& [kind, entry] : all_catalog_cases()) {
    const auto rep = enveloping_closure(two_dim_algebra<R>(entry.label, entry.params));
    const auto chk = compare_with_closure(entry, rep);
    EXPECT_TRUE(chk.dims_match) << entry.case_name;
    EXPECT_TRUE(chk.basis_in_closure) << entry.case_name;
    EXPECT_TRUE(chk.table_matches) << entry.case_name;
    EXPECT_EQ(chk.table_residual, 0.0) << entry.case_name;
  }
}

TEST(Catalog, SecondFormPrintedTableIsFlagged) {
  const auto e2 = catalog_2d<R>(Class2D::E2);
  ASSERT_TRUE(e2.printed_table.has_value());
  EXPECT_NE(*e2.printed_table, e2.table);
  EXPECT_FALSE(e2.note.empty());
  // yx = y: R_{e2} R_{e1} = R_{e2}
  EXPECT_EQ(e2.table(1, 0, 1), 1);
  const auto rep = enveloping_closure(two_dim_algebra<R>(Class2D::E2));
  auto printed = e2;
  printed.table = *e2.printed_table;
  EXPECT_FALSE(compare_with_closure(printed, rep).table_matches);
  for (const auto& [kind, entry] : all_catalog_cases())
    if (entry.label != Class2D::E2) {
      EXPECT_FALSE(entry.printed_table.has_value()) << kind;
    }
}

TEST(RankCases, TablesHaveExpectedShape) {
  const auto ms = rank_case_table<R>(RankCase::Ms, 3, 2);
  EXPECT_EQ(ms(2, 1, 2), 1);
  EXPECT_EQ(ms(2, 2, 2), 0);
  const auto m2 = rank_case_table<R>(RankCase::M2, 3);
  EXPECT_EQ(m2(0, 2, 0), 1);
  EXPECT_EQ(m2(2, 0, 2), 1);
  EXPECT_EQ(m2(1, 1, 1), 1);
}

TEST(RankCases, Examples) {
  const auto ms = classify_rank_cases(alg({{1, 1, 0}, {1, 1, 0}, {1, 1, 0}}));
  EXPECT_EQ(ms.label, RankCase::Ms);
  EXPECT_EQ(ms.s, 2u);
  EXPECT_EQ(ms.residual, 0.0);

  for (std::size_t n = 1; n <= 4; ++n) {
    const auto m1 = classify_rank_cases(EvolutionAlgebra<R>(Matrix<R>::identity(n)));
    EXPECT_EQ(m1.label, n == 1 ? RankCase::Ms : RankCase::M1) << n;
  }

  const auto m2 = classify_rank_cases(alg({{1, 0, 1}, {0, 1, 0}, {1, 0, 1}}));
  EXPECT_EQ(m2.label, RankCase::M2);
  EXPECT_EQ(m2.residual, 0.0);
}

TEST(RankCases, ThirdAndFourthTables) {
  const auto m3 = classify_rank_cases(alg({{1, 0, 0}, {0, 1, 0}, {2, 0, 0}}));
  EXPECT_EQ(m3.label, RankCase::M3) << m3.premise_report;
  const auto m4 = classify_rank_cases(alg({{1, 1, 0}, {0, 1, 0}, {0, 0, 0}}));
  EXPECT_EQ(m4.label, RankCase::M4) << m4.premise_report;
  EXPECT_EQ(m4.residual, 0.0);
}

TEST(RankCases, PremiseFailuresAreReported) {
  const auto e5 = classify_rank_cases(two_dim_algebra<R>(Class2D::E5, {R(2), R(3)}));
  EXPECT_EQ(e5.label, RankCase::NotApplicable);
  EXPECT_FALSE(e5.premise_report.empty());
  const auto zero = classify_rank_cases(EvolutionAlgebra<R>::zero(3));
  EXPECT_EQ(zero.label, RankCase::NotApplicable);
}

TEST(RankCases, ScaledRankOneFamilies) {
  oracle::Gen g(36);
  for (std::size_t n = 2; n <= 5; ++n)
    for (std::size_t s = 1; s <= n; ++s) {
      std::vector<R> v(n, R(0));
      for (std::size_t j = 0; j < s; ++j) v[j] = g.nonzero_rational();
      Matrix<R> m(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        const R t = g.nonzero_rational();
        for (std::size_t k = 0; k < n; ++k) m(i, k) = t * v[k];
      }
      const EvolutionAlgebra<R> e(m);
      if (enveloping_closure(e).dim != n) continue;
      const auto r = classify_rank_cases(e);
      EXPECT_EQ(r.label, RankCase::Ms) << r.premise_report;
      EXPECT_EQ(r.s, s);
      EXPECT_EQ(r.residual, 0.0);
    }
}

TEST(RankCases, WitnessLiesInEnvelope) {
  const auto r = classify_rank_cases(alg({{1, 0, 1}, {0, 1, 0}, {1, 0, 1}}));
  ASSERT_EQ(r.label, RankCase::M2);
  const auto env = enveloping_closure(alg({{1, 0, 1}, {0, 1, 0}, {1, 0, 1}}));
  for (std::size_t p = 0; p < 3; ++p) {
    Matrix<R> sum(3, 3);
    for (std::size_t b = 0; b < env.dim; ++b) sum = sum + env.basis[b] * r.witness_coords(p, b);
    EXPECT_EQ(sum, r.witness[p]);
  }
}
