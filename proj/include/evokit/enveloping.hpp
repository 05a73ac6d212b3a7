#pragma once

// Associative enveloping algebra M(E): the matrix algebra generated by the right
// multiplications R_{e_i}. Operators act on row vectors and R_x R_y means "apply
// R_x, then R_y", i.e. the plain matrix product; with this convention
// e_{i,j} e_{k,l} = delta_{j,k} e_{i,l}.

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "evokit/algebra.hpp"
#include "evokit/two_dim_forms.hpp"

namespace evokit {

/// Associative structure constants: x_p x_q = sum_r c(p, q, r) x_r.
template <Field T>
class StructureTable {
 public:
  StructureTable() = default;
  explicit StructureTable(std::size_t dim) : dim_(dim), c_(dim * dim * dim, T(0)) {}

  std::size_t dim() const noexcept { return dim_; }
  T& operator()(std::size_t p, std::size_t q, std::size_t r) { return c_[(p * dim_ + q) * dim_ + r]; }
  const T& operator()(std::size_t p, std::size_t q, std::size_t r) const { return c_[(p * dim_ + q) * dim_ + r]; }
  const std::vector<T>& data() const noexcept { return c_; }

  friend bool operator==(const StructureTable&, const StructureTable&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<T> c_;
};

template <Field T>
double max_abs_diff(const StructureTable<T>& a, const StructureTable<T>& b) {
  if (a.dim() != b.dim()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, magnitude(T(a.data()[k] - b.data()[k])));
  return m;
}

/// Incrementally maintained reduced echelon basis of a subspace of T^len.
/// Every stored vector has a 1 at its pivot and 0 at every other stored pivot.
template <Field T>
class SpanBasis {
 public:
  explicit SpanBasis(std::size_t length, double tol = kDefaultTol) : len_(length), tol_(tol) {}

  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t length() const noexcept { return len_; }

  std::vector<std::vector<T>> vectors() const {
    std::vector<std::vector<T>> out;
    for (const auto& r : rows_) out.push_back(r.v);
    return out;
  }

  /// Adds v if it is independent of the current span. Returns whether it was added.
  bool insert(const std::vector<T>& v) {
    std::vector<T> r = residual(v);
    const double thr = threshold(v);
    std::size_t pivot = len_;
    if constexpr (field_traits<T>::exact) {
      for (std::size_t k = 0; k < len_; ++k)
        if (r[k] != 0) {
          pivot = k;
          break;
        }
    } else {
      double best = thr;
      for (std::size_t k = 0; k < len_; ++k)
        if (magnitude(r[k]) > best) {
          best = magnitude(r[k]);
          pivot = k;
        }
    }
    if (pivot == len_) return false;
    const T inv = T(1) / r[pivot];
    for (auto& x : r) x *= inv;
    r[pivot] = T(1);
    for (auto& row : rows_) {
      const T f = row.v[pivot];
      if (f == T(0)) continue;
      for (std::size_t k = 0; k < len_; ++k) row.v[k] -= f * r[k];
      row.v[pivot] = T(0);
    }
    auto pos = std::lower_bound(rows_.begin(), rows_.end(), pivot,
                                [](const Row& row, std::size_t p) { return row.pivot < p; });
    rows_.insert(pos, Row{pivot, std::move(r)});
    return true;
  }

  /// Coordinates of v in the stored basis, or nothing if v is outside the span.
  std::optional<std::vector<T>> coordinates(const std::vector<T>& v) const {
    std::vector<T> c;
    for (const auto& row : rows_) c.push_back(v[row.pivot]);
    if (max_abs(residual(v)) > threshold(v)) return std::nullopt;
    return c;
  }

  /// v minus its projection along the stored pivots.
  std::vector<T> residual(std::vector<T> v) const {
    if (v.size() != len_) throw DimensionMismatch("vector length does not match span");
    for (const auto& row : rows_) {
      const T f = v[row.pivot];
      if (f == T(0)) continue;
      for (std::size_t k = 0; k < len_; ++k) v[k] -= f * row.v[k];
      v[row.pivot] = T(0);
    }
    return v;
  }

 private:
  struct Row {
    std::size_t pivot;
    std::vector<T> v;
  };

  double threshold(const std::vector<T>& v) const {
    if constexpr (field_traits<T>::exact) return 0.0;
    return tol_ * std::max(1.0, max_abs(v));
  }

  std::size_t len_;
  double tol_;
  std::vector<Row> rows_;
};

template <Field T>
Matrix<T> from_vectorized(std::size_t n, const std::vector<T>& v) {
  return Matrix<T>(n, n, v);
}

/// R_{e_i} R_{e_j} = a_{i,j} (row j of A placed in row i).
template <Field T>
Matrix<T> generator_product(const EvolutionAlgebra<T>& e, std::size_t i, std::size_t j) {
  const std::size_t n = e.dim();
  if (i >= n || j >= n) throw InvalidParameters("generator index out of range");
  Matrix<T> m(n, n);
  const T& aij = e.coeff(i, j);
  if (aij == T(0)) return m;
  for (std::size_t k = 0; k < n; ++k) m(i, k) = aij * e.coeff(j, k);
  return m;
}

template <Field T>
std::vector<Matrix<T>> generators(const EvolutionAlgebra<T>& e) {
  std::vector<Matrix<T>> g;
  for (std::size_t i = 0; i < e.dim(); ++i) g.push_back(right_mult_matrix(e, Element<T>::basis(e.dim(), i)));
  return g;
}

/// r_i = rank of the matrix whose row j is a_{i,j} (row j of A).
template <Field T>
std::vector<std::size_t> per_row_ranks(const EvolutionAlgebra<T>& e, double tol = kDefaultTol) {
  const std::size_t n = e.dim();
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix<T> m(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) m(j, k) = e.coeff(i, j) * e.coeff(j, k);
    r.push_back(rank(m, tol));
  }
  return r;
}

template <Field T>
struct TableResult {
  StructureTable<T> table;
  bool closed = true;       // every product lies in the span
  double residual = 0.0;    // worst reconstruction error of a product
};

/// Structure constants of the algebra spanned by the (independent) matrices in `basis`.
template <Field T>
TableResult<T> structure_constants(const std::vector<Matrix<T>>& basis, double tol = kDefaultTol) {
  const std::size_t d = basis.size();
  TableResult<T> out{StructureTable<T>(d), true, 0.0};
  if (d == 0) return out;
  const std::size_t len = basis.front().data().size();
  Matrix<T> rows(d, len);
  for (std::size_t p = 0; p < d; ++p) std::copy(basis[p].data().begin(), basis[p].data().end(), rows.row(p).begin());
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = 0; q < d; ++q) {
      const Matrix<T> prod = basis[p] * basis[q];
      auto c = solve_in_row_span(rows, prod.data(), tol);
      if (!c) {
        out.closed = false;
        out.residual = std::numeric_limits<double>::infinity();
        continue;
      }
      for (std::size_t r = 0; r < d; ++r) out.table(p, q, r) = (*c)[r];
      out.residual = std::max(out.residual, max_abs_diff(Matrix<T>(1, len, (*c) * rows),
                                                         Matrix<T>(1, len, prod.data())));
    }
  return out;
}

template <Field T>
struct EnvelopingReport {
  std::vector<Matrix<T>> basis;  // reduced echelon over the n^2 row-major coordinates, pivot-sorted
  std::size_t dim = 0;
  StructureTable<T> assoc_constants;
  std::vector<std::size_t> per_row_ranks;
  std::size_t sum_ranks = 0;
  bool formula_agrees = false;  // dim == sum_ranks
  double closure_residual = 0.0;
};

/// Span closure of {R_{e_i}} under multiplication by the generators on both sides.
template <Field T>
EnvelopingReport<T> enveloping_closure(const EvolutionAlgebra<T>& e, double tol = kDefaultTol) {
  const std::size_t n = e.dim();
  SpanBasis<T> span(n * n, tol);
  std::vector<Matrix<T>> gens;
  for (auto& g : generators(e))
    if (!g.is_zero()) gens.push_back(std::move(g));

  std::vector<Matrix<T>> queue;
  for (const auto& g : gens)
    if (span.insert(g.data())) queue.push_back(g);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const auto& g : gens) {
      for (Matrix<T> prod : {Matrix<T>(queue[head] * g), Matrix<T>(g * queue[head])})
        if (span.insert(prod.data())) queue.push_back(std::move(prod));
    }
  }

  EnvelopingReport<T> report;
  for (const auto& v : span.vectors()) report.basis.push_back(from_vectorized(n, v));
  report.dim = report.basis.size();
  report.assoc_constants = StructureTable<T>(report.dim);
  for (std::size_t p = 0; p < report.dim; ++p)
    for (std::size_t q = 0; q < report.dim; ++q) {
      const Matrix<T> prod = report.basis[p] * report.basis[q];
      auto c = span.coordinates(prod.data());
      std::vector<T> res = span.residual(prod.data());
      report.closure_residual = std::max(report.closure_residual, max_abs(res));
      if (!c) continue;
      for (std::size_t r = 0; r < report.dim; ++r) report.assoc_constants(p, q, r) = (*c)[r];
    }
  report.per_row_ranks = per_row_ranks(e, tol);
  for (auto r : report.per_row_ranks) report.sum_ranks += r;
  report.formula_agrees = report.dim == report.sum_ranks;
  return report;
}

// ---------------------------------------------------------------------------
// Catalog of M(E) for the 2-dimensional algebras.

template <Field T>
struct CatalogEntry {
  Class2D label;
  std::vector<T> params;
  std::string case_name;
  std::size_t dim = 0;
  std::vector<std::string> symbols;
  std::vector<Matrix<T>> named_basis;  // concrete matrices the symbols stand for
  StructureTable<T> table;
  std::optional<StructureTable<T>> printed_table;  // table as usually printed, when it disagrees with `table`
  std::string note;
};

namespace detail {

template <Field T>
StructureTable<T> matrix_unit_table() {
  // basis e11, e12, e21, e22 in that order
  StructureTable<T> t(4);
  auto idx = [](std::size_t i, std::size_t j) { return 2 * i + j; };
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t l = 0; l < 2; ++l) t(idx(i, j), idx(j, l), idx(i, l)) = T(1);
  return t;
}

}  // namespace detail

/// Expected M(E) for a 2-dimensional canonical form: dimension, a concrete basis inside M(E)
/// and its multiplication table.
template <Field T>
CatalogEntry<T> catalog_2d(Class2D label, const std::vector<T>& params = {}) {
  if (label == Class2D::Abelian) throw InvalidParameters("M(E) of the abelian algebra is zero; not catalogued");
  const auto algebra = two_dim_algebra<T>(label, params);  // validates the parameters
  (void)algebra;
  auto u = [](std::size_t i, std::size_t k) { return Matrix<T>::unit(2, i, k); };
  CatalogEntry<T> c{label, params, to_string(label), 0, {}, {}, {}, std::nullopt, {}};
  switch (label) {
    case Class2D::E1:
      c.dim = 1;
      c.symbols = {"x"};
      c.named_basis = {u(0, 0)};
      c.table = StructureTable<T>(1);
      c.table(0, 0, 0) = T(1);
      break;
    case Class2D::E2: {
      c.dim = 2;
      c.symbols = {"x", "y"};
      c.named_basis = {u(0, 0), u(1, 0)};
      c.table = StructureTable<T>(2);
      c.table(0, 0, 0) = T(1);  // xx = x
      c.table(1, 0, 1) = T(1);  // yx = y
      StructureTable<T> printed(2);
      printed(0, 0, 0) = T(1);
      printed(1, 0, 0) = T(1);  // printed: yx = x
      c.printed_table = printed;
      c.note = "suspected typo: the printed table has yx = x, the span closure gives yx = y";
      break;
    }
    case Class2D::E3:
      c.dim = 2;
      c.symbols = {"x", "y"};
      c.named_basis = {u(0, 0) + u(0, 1), T(-1) * (u(1, 0) + u(1, 1))};
      c.table = StructureTable<T>(2);
      c.table(0, 0, 0) = T(1);   // xx = x
      c.table(0, 1, 0) = T(-1);  // xy = -x
      c.table(1, 0, 1) = T(1);   // yx = y
      c.table(1, 1, 1) = T(-1);  // yy = -y
      break;
    case Class2D::E4:
      c.dim = 1;
      c.symbols = {"x"};
      c.named_basis = {u(0, 1)};
      c.table = StructureTable<T>(1);  // xx = 0
      break;
    case Class2D::E5: {
      const bool z2 = params[0] == T(0);
      const bool z3 = params[1] == T(0);
      if (z2 && z3) {
        c.case_name = "E5(0,0)";
        c.dim = 2;
        c.symbols = {"x", "y"};
        c.named_basis = {u(0, 0), u(1, 1)};
        c.table = StructureTable<T>(2);
        c.table(0, 0, 0) = T(1);
        c.table(1, 1, 1) = T(1);
      } else if (z2 || z3) {
        // triangular 2x2 matrices; upper for a3 = 0, lower (conjugate by the swap) for a2 = 0
        c.case_name = z3 ? "E5(a2,0)" : "E5(0,a3)";
        c.dim = 3;
        c.symbols = {"b1", "b2", "b3"};
        c.named_basis = z3 ? std::vector<Matrix<T>>{u(0, 0), u(0, 1), u(1, 1)}
                           : std::vector<Matrix<T>>{u(1, 1), u(1, 0), u(0, 0)};
        c.table = StructureTable<T>(3);
        c.table(0, 0, 0) = T(1);
        c.table(0, 1, 1) = T(1);
        c.table(1, 2, 1) = T(1);
        c.table(2, 2, 2) = T(1);
      } else {
        c.case_name = "E5(a2,a3), a2 a3 != 0";
        c.dim = 4;
        c.symbols = {"e11", "e12", "e21", "e22"};
        c.named_basis = {u(0, 0), u(0, 1), u(1, 0), u(1, 1)};
        c.table = detail::matrix_unit_table<T>();
      }
      break;
    }
    case Class2D::E6:
      c.dim = 4;
      c.symbols = {"e11", "e12", "e21", "e22"};
      c.named_basis = {u(0, 0), u(0, 1), u(1, 0), u(1, 1)};
      c.table = detail::matrix_unit_table<T>();
      break;
    case Class2D::Abelian: break;
  }
  return c;
}

struct CatalogCheck {
  bool dims_match = false;
  bool basis_in_closure = false;
  bool table_matches = false;
  double table_residual = 0.0;
  bool ok() const { return dims_match && basis_in_closure && table_matches; }
};

/// Checks a catalog entry against a computed closure: the named matrices must lie in M(E),
/// be as many as dim M(E), and multiply according to the catalog table.
template <Field T>
CatalogCheck compare_with_closure(const CatalogEntry<T>& entry, const EnvelopingReport<T>& report,
                                  double tol = kDefaultTol) {
  CatalogCheck chk;
  chk.dims_match = entry.dim == report.dim && entry.named_basis.size() == report.dim;
  const std::size_t len = entry.named_basis.empty() ? 0 : entry.named_basis.front().data().size();
  SpanBasis<T> closure(len, tol);
  for (const auto& b : report.basis) closure.insert(b.data());
  chk.basis_in_closure = true;
  SpanBasis<T> named(len, tol);
  for (const auto& b : entry.named_basis) {
    chk.basis_in_closure = chk.basis_in_closure && closure.coordinates(b.data()).has_value();
    chk.basis_in_closure = named.insert(b.data()) && chk.basis_in_closure;
  }
  const auto computed = structure_constants(entry.named_basis, tol);
  chk.table_residual = computed.closed ? max_abs_diff(computed.table, entry.table)
                                       : std::numeric_limits<double>::infinity();
  chk.table_matches = computed.closed && (field_traits<T>::exact ? computed.table == entry.table
                                                                 : chk.table_residual < 1e-8);
  return chk;
}

// ---------------------------------------------------------------------------
// Classification of M(E) when dim M(E) = n and rank A is 1, n - 1 or n.

enum class RankCase { Ms, M1, M2, M3, M4, NotApplicable };

inline const char* to_string(RankCase c) {
  switch (c) {
    case RankCase::Ms: return "Ms";
    case RankCase::M1: return "M1";
    case RankCase::M2: return "M2";
    case RankCase::M3: return "M3";
    case RankCase::M4: return "M4";
    case RankCase::NotApplicable: return "NotApplicable";
  }
  return "?";
}

/// Target tables (0-based symbols x_0 .. x_{n-1}).
///   Ms(s): x_i x_j = x_i for every i and j < s
///   M1:    x_i x_i = x_i
///   M2:    M1 plus x_0 x_{n-1} = x_0, x_{n-1} x_0 = x_{n-1}
///   M3:    x_i x_i = x_i (i < n-1), x_{n-1} x_0 = x_{n-1}
///   M4:    x_i x_i = x_i (i < n-1), x_0 x_1 = x_{n-1}, x_0 x_{n-1} = x_{n-1}, x_{n-1} x_1 = x_{n-1}
template <Field T>
StructureTable<T> rank_case_table(RankCase label, std::size_t n, std::size_t s = 0) {
  StructureTable<T> t(n);
  const std::size_t last = n - 1;
  switch (label) {
    case RankCase::Ms:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < s; ++j) t(i, j, i) = T(1);
      break;
    case RankCase::M1:
    case RankCase::M2:
      for (std::size_t i = 0; i < n; ++i) t(i, i, i) = T(1);
      if (label == RankCase::M2) {
        t(0, last, 0) = T(1);
        t(last, 0, last) = T(1);
      }
      break;
    case RankCase::M3:
      for (std::size_t i = 0; i < last; ++i) t(i, i, i) = T(1);
      t(last, 0, last) = T(1);
      break;
    case RankCase::M4:
      for (std::size_t i = 0; i < last; ++i) t(i, i, i) = T(1);
      t(0, 1, last) = T(1);
      t(0, last, last) = T(1);
      t(last, 1, last) = T(1);
      break;
    case RankCase::NotApplicable: break;
  }
  return t;
}

template <Field T>
struct RankCaseAnalysis {
  RankCase label = RankCase::NotApplicable;
  std::size_t s = 0;               // for Ms
  std::string premise_report;      // failed hypothesis, or the construction used
  std::vector<Matrix<T>> witness;  // new basis x_0 .. x_{n-1} of M(E), as operators
  Matrix<T> witness_coords;        // rows: coordinates of x_p over the closure basis
  double residual = 0.0;           // |computed table - target table|
};

namespace detail {

template <Field T>
RankCaseAnalysis<T> not_applicable(std::string why) {
  RankCaseAnalysis<T> r;
  r.premise_report = std::move(why);
  return r;
}

template <Field T>
bool rows_proportional(const Matrix<T>& a, std::size_t p, std::size_t q, double tol) {
  Matrix<T> two(2, a.cols());
  std::copy(a.row(p).begin(), a.row(p).end(), two.row(0).begin());
  std::copy(a.row(q).begin(), a.row(q).end(), two.row(1).begin());
  return rank(two, tol) == 1;
}

}  // namespace detail

template <Field T>
RankCaseAnalysis<T> classify_rank_cases(const EvolutionAlgebra<T>& e, double tol = kDefaultTol) {
  const std::size_t n = e.dim();
  const Matrix<T>& a = e.structure();
  const auto env = enveloping_closure(e, tol);
  if (env.dim != n)
    return detail::not_applicable<T>("dim M(E) = " + std::to_string(env.dim) + " but n = " + std::to_string(n));
  const std::size_t r = rank(a, tol);
  const auto gens = generators(e);
  auto is_zero = [&](const T& x) { return field_traits<T>::is_zero(x, tol * std::max(1.0, a.max_abs())); };

  RankCaseAnalysis<T> out;
  std::vector<Matrix<T>>& x = out.witness;

  if (r == 1) {
    // rows are t_i v with v the first nonzero row
    std::size_t f = 0;
    while (f < n && a.row(f).end() == std::find_if(a.row(f).begin(), a.row(f).end(),
                                                   [&](const T& v) { return !is_zero(v); }))
      ++f;
    std::size_t k = 0;
    while (is_zero(a(f, k))) ++k;
    std::vector<T> t(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = a(i, k) / a(f, k);
      if (is_zero(t[i])) return detail::not_applicable<T>("rank A = 1 but row " + std::to_string(i + 1) + " vanishes");
    }
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < n; ++j)
      if (!is_zero(a(f, j))) order.push_back(j);
    out.s = order.size();
    for (std::size_t j = 0; j < n; ++j)
      if (is_zero(a(f, j))) order.push_back(j);
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t j = order[p];
      x.push_back(p < out.s ? Matrix<T>(gens[j] * T(T(1) / (t[j] * a(f, j)))) : gens[j]);
    }
    out.label = RankCase::Ms;
    out.premise_report = "rank A = 1: nonzero directions first, R_{e_j} scaled by 1/(t_j a_j)";
  } else if (r == n) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && !is_zero(a(i, j)))
          return detail::not_applicable<T>("rank A = n but a_{" + std::to_string(i + 1) + "," +
                                           std::to_string(j + 1) + "} != 0");
    for (std::size_t i = 0; i < n; ++i) x.push_back(gens[i] * T(T(1) / a(i, i)));
    out.label = RankCase::M1;
    out.premise_report = "rank A = n: R_{e_i} scaled by 1/a_{i,i}";
  } else if (r + 1 == n) {
    std::vector<std::size_t> zero_rows;
    for (std::size_t i = 0; i < n; ++i)
      if (gens[i].is_zero()) zero_rows.push_back(i);
    auto diag_ok = [&](std::size_t i) { return !is_zero(a(i, i)); };

    if (zero_rows.size() == 1) {
      // R_{e_n} = 0: a single off-diagonal a_{i0,j0} among the remaining rows
      const std::size_t z = zero_rows.front();
      std::vector<std::pair<std::size_t, std::size_t>> offdiag;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && i != z && j != z && !is_zero(a(i, j))) offdiag.emplace_back(i, j);
      if (offdiag.size() != 1)
        return detail::not_applicable<T>("R_{e_n} = 0 but " + std::to_string(offdiag.size()) +
                                         " off-diagonal coefficients among the other rows");
      const auto [i0, j0] = offdiag.front();
      std::vector<std::size_t> order{i0, j0};
      for (std::size_t i = 0; i < n; ++i)
        if (i != i0 && i != j0 && i != z) order.push_back(i);
      for (auto i : order)
        if (!diag_ok(i)) return detail::not_applicable<T>("vanishing diagonal a_{" + std::to_string(i + 1) + "," +
                                                          std::to_string(i + 1) + "}");
      for (auto i : order) x.push_back(gens[i] * T(T(1) / a(i, i)));
      x.push_back(Matrix<T>(gens[i0] * gens[j0]) * T(T(1) / (a(i0, i0) * a(j0, j0))));
      out.label = RankCase::M4;
      out.premise_report = "rank A = n-1, R_{e_n} = 0 (dependent row " + std::to_string(z + 1) +
                           "): x_n = R_{e_" + std::to_string(i0 + 1) + "} R_{e_" + std::to_string(j0 + 1) + "}";
    } else if (zero_rows.empty()) {
      std::optional<std::pair<std::size_t, std::size_t>> pair;
      for (std::size_t p = 0; p < n && !pair; ++p)
        for (std::size_t q = p + 1; q < n && !pair; ++q)
          if (detail::rows_proportional(a, p, q, tol)) pair = std::make_pair(p, q);
      if (!pair) return detail::not_applicable<T>("rank A = n-1 but no row is a multiple of a single other row");
      const auto [k0, d] = *pair;
      std::vector<std::size_t> mids;
      for (std::size_t i = 0; i < n; ++i)
        if (i != k0 && i != d) mids.push_back(i);
      for (auto i : mids)
        if (!diag_ok(i)) return detail::not_applicable<T>("vanishing diagonal a_{" + std::to_string(i + 1) + "," +
                                                          std::to_string(i + 1) + "}");
      const T& a11 = a(k0, k0);
      const T& a1n = a(k0, d);
      std::string how;
      if (!is_zero(a11) && !is_zero(a1n)) {
        x.push_back(gens[k0] * T(T(1) / a11));
        for (auto i : mids) x.push_back(gens[i] * T(T(1) / a(i, i)));
        x.push_back(gens[d] * T(T(1) / a(d, d)));
        out.label = RankCase::M2;
        how = "a_{1,1} a_{1,n} != 0";
      } else if (!is_zero(a11)) {
        x.push_back(gens[k0] * T(T(1) / a11));
        for (auto i : mids) x.push_back(gens[i] * T(T(1) / a(i, i)));
        x.push_back(gens[d]);
        out.label = RankCase::M3;
        how = "a_{1,n} = 0";
      } else {
        x.push_back(gens[d] * T(T(1) / a(d, d)));
        for (auto i : mids) x.push_back(gens[i] * T(T(1) / a(i, i)));
        x.push_back(gens[k0]);
        out.label = RankCase::M3;
        how = "a_{1,1} = 0, x_1 and x_n exchanged";
      }
      out.premise_report = "rank A = n-1, R_{e_n} != 0 (rows " + std::to_string(k0 + 1) + " and " +
                           std::to_string(d + 1) + " proportional): " + how;
    } else {
      return detail::not_applicable<T>("rank A = n-1 with more than one zero row");
    }
  } else {
    return detail::not_applicable<T>("rank A = " + std::to_string(r) + " is not 1, n-1 or n");
  }

  const auto computed = structure_constants(x, tol);
  const auto target = rank_case_table<T>(out.label, n, out.s);
  out.residual = computed.closed ? max_abs_diff(computed.table, target) : std::numeric_limits<double>::infinity();
  const bool match = computed.closed && (field_traits<T>::exact ? computed.table == target : out.residual < 1e-8);
  if (!match) {
    auto na = detail::not_applicable<T>("construction '" + out.premise_report + "' does not reproduce the " +
                                        to_string(out.label) + " table");
    na.residual = out.residual;
    return na;
  }
  SpanBasis<T> closure(n * n, tol);
  for (const auto& b : env.basis) closure.insert(b.data());
  out.witness_coords = Matrix<T>(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    auto c = closure.coordinates(x[p].data());
    if (!c) return detail::not_applicable<T>("witness element outside M(E)");
    std::copy(c->begin(), c->end(), out.witness_coords.row(p).begin());
  }
  return out;
}

}  // namespace evokit
