#pragma once

// Absolute nilpotents (x x = 0) and idempotents (x x = x).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "evokit/algebra.hpp"

namespace evokit {

struct NilpotentReport {
  bool exists_nontrivial = false;
  std::optional<Element<Complex>> witness;
  double verification_residual = 0.0;  // |x x|_inf of the witness
};

/// A nontrivial x with x x = 0 exists iff det A = 0. The witness takes y in ker(A^T)
/// (first canonical kernel vector, scaled to unit max-norm) and x_i = sqrt(y_i), principal branch.
template <Field T>
NilpotentReport absolute_nilpotent(const EvolutionAlgebra<T>& e, double tol = kDefaultTol) {
  NilpotentReport report;
  const std::size_t n = e.dim();
  if constexpr (field_traits<T>::exact) {
    report.exists_nontrivial = det(e.structure()) == 0;
  } else {
    report.exists_nontrivial = rank(e.structure(), tol) < n;
  }
  if (!report.exists_nontrivial) return report;

  const auto kernel = solve_kernel(e.structure().transpose(), tol);
  if (kernel.empty()) throw SingularMatrix("kernel of A^T unexpectedly empty");
  std::vector<T> y = kernel.front();
  const double scale = max_abs(y);
  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sqrt(to_complex(y[i]) / scale);
  Element<Complex> w(std::move(x));
  report.verification_residual = square(to_complex(e), w).norm_inf();
  report.witness = std::move(w);
  return report;
}

/// Over the reals a Markov evolution algebra has only trivial absolute nilpotents:
/// summing the coordinates of x x gives sum x_i^2. Returns the result of an additional
/// randomized search (n <= 3) for real x with |x|_inf in [0.1, 10] and |x x|_inf < 1e-8.
inline bool markov_real_nilpotent_check(const EvolutionAlgebra<Rational>& e, std::uint64_t seed = 1,
                                        std::size_t samples = 4000) {
  if (!is_markov(e)) throw PreconditionFailed("algebra is not Markov (some row of A does not sum to 1)");
  const std::size_t n = e.dim();
  if (n > 3) return true;
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) a[i * n + k] = e.coeff(i, k).convert_to<double>();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> log_radius(std::log(0.1), std::log(10.0));
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> x(n);
    for (auto& v : x) v = unit(rng);
    double m = 1e-300;
    for (double v : x) m = std::max(m, std::abs(v));
    const double r = std::exp(log_radius(rng)) / m;
    for (auto& v : x) v *= r;
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double s_k = 0.0;
      for (std::size_t i = 0; i < n; ++i) s_k += x[i] * x[i] * a[i * n + k];
      worst = std::max(worst, std::abs(s_k));
    }
    if (worst < 1e-8) return false;
  }
  return true;
}

enum class IdempotentMethod { closed_form, numeric_multistart };

inline const char* to_string(IdempotentMethod m) {
  return m == IdempotentMethod::closed_form ? "closed-form" : "numeric-multistart";
}

struct IdempotentSet {
  std::vector<Element<Complex>> elements;
  IdempotentMethod method = IdempotentMethod::numeric_multistart;
};

/// Idempotents of CYC_n as exponent vectors: x_i = w^{e_i} with w = exp(2 pi i / (2^n - 1)),
/// e_1 = k, e_{i+1} = 2 e_i mod (2^n - 1), for k = 0 .. 2^n - 2.
inline std::vector<std::vector<std::uint64_t>> cyc_idempotent_exponents(std::size_t n) {
  if (n == 0 || n > 62) throw InvalidParameters("CYC_n idempotents need 1 <= n <= 62");
  const std::uint64_t m = (std::uint64_t{1} << n) - 1;
  std::vector<std::vector<std::uint64_t>> out;
  for (std::uint64_t k = 0; k < m; ++k) {
    std::vector<std::uint64_t> e(n);
    e[0] = k;
    for (std::size_t i = 1; i < n; ++i) e[i] = (2 * e[i - 1]) % m;
    out.push_back(std::move(e));
  }
  return out;
}

/// The 2^n - 1 nonzero idempotents of CYC_n.
inline IdempotentSet idempotents_cyc(std::size_t n) {
  const double m = std::ldexp(1.0, static_cast<int>(n)) - 1.0;
  IdempotentSet set{{}, IdempotentMethod::closed_form};
  for (const auto& exps : cyc_idempotent_exponents(n)) {
    std::vector<Complex> x;
    for (auto k : exps) x.push_back(std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / m));
    set.elements.emplace_back(std::move(x));
  }
  return set;
}

namespace detail {

/// Lexicographic order on coordinates rounded to a 1e-6 grid.
inline bool rounded_less(const Element<Complex>& a, const Element<Complex>& b) {
  auto key = [](const Complex& z) {
    return std::pair<long long, long long>(std::llround(z.real() * 1e6), std::llround(z.imag() * 1e6));
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto ka = key(a[i]);
    auto kb = key(b[i]);
    if (ka != kb) return ka < kb;
  }
  return false;
}

/// |x x - x|_inf evaluated in extended precision.
inline double idempotent_residual_extended(const EvolutionAlgebra<Complex>& e, const Element<Complex>& x) {
  using LC = std::complex<long double>;
  const std::size_t n = e.dim();
  long double worst = 0;
  for (std::size_t k = 0; k < n; ++k) {
    LC s = -LC(x[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const LC xi(x[i]);
      s += xi * xi * LC(e.coeff(i, k));
    }
    worst = std::max(worst, std::abs(s));
  }
  return static_cast<double>(worst);
}

}  // namespace detail

/// Damped Newton on F(x) = x x - x from `attempts` random starts in the disk |z| <= 2.
/// Converged nonzero roots are deduplicated at 1e-6 and sorted; no completeness is claimed.
inline IdempotentSet idempotents_numeric(const EvolutionAlgebra<Complex>& e, std::size_t attempts = 200,
                                         std::uint64_t seed = 1) {
  const std::size_t n = e.dim();
  if (n > 4) throw PreconditionFailed("numeric idempotent search is limited to dimension <= 4");
  auto residual_vec = [&](const Element<Complex>& x) { return square(e, x) - x; };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  IdempotentSet set{{}, IdempotentMethod::numeric_multistart};

  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    std::vector<Complex> start(n);
    for (auto& z : start) z = std::polar(2.0 * std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
    Element<Complex> x(std::move(start));
    Element<Complex> f = residual_vec(x);
    double fnorm = f.norm_inf();
    for (int iter = 0; iter < 100 && fnorm > 1e-14; ++iter) {
      // J_{k,j} = 2 x_j a_{j,k} - delta_{jk}; solve J dx = -F (J acts on column vectors).
      Matrix<Complex> jac(n, n);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) jac(k, j) = 2.0 * x[j] * e.coeff(j, k) - (j == k ? 1.0 : 0.0);
      std::vector<Complex> dx;
      try {
        dx = (-1.0 * f).coords * invert(jac, 1e-13).transpose();
      } catch (const SingularMatrix&) {
        break;
      }
      double step = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
        Element<Complex> trial = x + step * Element<Complex>(dx);
        Element<Complex> ft = residual_vec(trial);
        if (ft.norm_inf() < fnorm) {
          x = std::move(trial);
          f = std::move(ft);
          fnorm = f.norm_inf();
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (fnorm > 1e-10 || x.norm_inf() < 1e-6) continue;
    if (detail::idempotent_residual_extended(e, x) >= 1e-9) continue;
    const bool duplicate = std::any_of(set.elements.begin(), set.elements.end(),
                                       [&](const Element<Complex>& y) { return (x - y).norm_inf() <= 1e-6; });
    if (!duplicate) set.elements.push_back(std::move(x));
  }
  std::sort(set.elements.begin(), set.elements.end(), detail::rounded_less);
  return set;
}

}  // namespace evokit
