#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

#include "evokit/errors.hpp"

namespace evokit {

using BigInt = boost::multiprecision::cpp_int;
/// Exact rational; always stored in lowest terms with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

/// Default relative pivot / zero threshold for floating-point work.
inline constexpr double kDefaultTol = 1e-9;

enum class Domain { rational, complex };

inline const char* to_string(Domain d) { return d == Domain::rational ? "rational" : "complex"; }

template <class T>
struct field_traits;

template <>
struct field_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr Domain domain = Domain::rational;
  static double magnitude(const Rational& x) {
    return boost::multiprecision::abs(x).convert_to<double>();
  }
  /// Threshold is ignored: zero means zero.
  static bool is_zero(const Rational& x, double /*threshold*/ = 0.0) { return x == 0; }
  static Complex to_complex(const Rational& x) { return {x.convert_to<double>(), 0.0}; }
};

template <>
struct field_traits<Complex> {
  static constexpr bool exact = false;
  static constexpr Domain domain = Domain::complex;
  static double magnitude(const Complex& x) { return std::abs(x); }
  static bool is_zero(const Complex& x, double threshold = 0.0) { return std::abs(x) <= threshold; }
  static Complex to_complex(const Complex& x) { return x; }
};

template <class T>
concept Field = std::is_same_v<T, Rational> || std::is_same_v<T, Complex>;

template <Field T>
double magnitude(const T& x) {
  return field_traits<T>::magnitude(x);
}

template <Field T>
Complex to_complex(const T& x) {
  return field_traits<T>::to_complex(x);
}

/// Bit size of a rational (numerator plus denominator); 0 for zero.
inline std::size_t bit_size(const Rational& x) {
  auto bits = [](const BigInt& v) -> std::size_t {
    return v == 0 ? 0 : boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1;
  };
  return bits(boost::multiprecision::numerator(x)) + bits(boost::multiprecision::denominator(x));
}

/// Result of an explicit Rational -> Complex promotion.
template <class V>
struct Promoted {
  V value;
  bool lossy = false;  // some entry was not exactly representable as a double
};

inline Promoted<Complex> promote(const Rational& x) {
  const double d = x.convert_to<double>();
  return {Complex{d, 0.0}, !std::isfinite(d) || Rational(d) != x};
}

// ---------------------------------------------------------------------------
// Integer roots, used for exact rational radicals.

/// Floor of the m-th root of a non-negative integer.
inline BigInt integer_root_floor(const BigInt& n, unsigned m) {
  if (n < 2 || m == 1) return n;
  const unsigned bits = boost::multiprecision::msb(n) + 1;
  BigInt x = BigInt(1) << (bits / m + 1);  // x >= true root
  while (true) {
    BigInt y = ((m - 1) * x + n / boost::multiprecision::pow(x, m - 1)) / m;
    if (y >= x) return x;
    x = y;
  }
}

/// Exact m-th root of a rational, if one exists in Q (real root; odd m admits negatives).
inline std::optional<Rational> exact_root(const Rational& x, unsigned m) {
  if (m == 0) return std::nullopt;
  if (x == 0 || m == 1) return x;
  BigInt num = boost::multiprecision::numerator(x);
  const BigInt den = boost::multiprecision::denominator(x);
  const bool negative = num < 0;
  if (negative && m % 2 == 0) return std::nullopt;
  if (negative) num = -num;
  const BigInt rn = integer_root_floor(num, m);
  const BigInt rd = integer_root_floor(den, m);
  if (boost::multiprecision::pow(rn, m) != num || boost::multiprecision::pow(rd, m) != den)
    return std::nullopt;
  Rational r(rn, rd);
  return negative ? Rational(-r) : r;
}

// ---------------------------------------------------------------------------
// Text syntax: rationals "p/q" or "p"; complex "a", "bi", "a+bi", "a-bi".

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline BigInt parse_bigint(std::string_view s) {
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  BigInt v{std::string(s)};
  return negative ? BigInt(-v) : v;
}

inline double parse_double(std::string_view s, std::string_view whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ParseError("", 0, "invalid complex scalar '" + std::string(whole) + "'");
  if (!std::isfinite(v))
    throw ParseError("", 0, "non-finite complex scalar '" + std::string(whole) + "'");
  return v;
}

inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace detail

inline Rational parse_rational(std::string_view text) {
  const std::string_view s = detail::trim(text);
  const auto slash = s.find('/');
  const std::string_view num = s.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : s.substr(slash + 1);
  if (!detail::is_integer_literal(num) || !detail::is_integer_literal(den) || den.front() == '-' ||
      den.front() == '+')
    throw ParseError("", 0, "invalid rational scalar '" + std::string(text) + "'");
  const BigInt d = detail::parse_bigint(den);
  if (d == 0) throw ParseError("", 0, "zero denominator in '" + std::string(text) + "'");
  return Rational(detail::parse_bigint(num), d);
}

inline Complex parse_complex(std::string_view text) {
  const std::string_view s = detail::trim(text);
  if (s.empty()) throw ParseError("", 0, "empty complex scalar");
  if (s.back() != 'i') return {detail::parse_double(s, text), 0.0};

  const std::string_view body = s.substr(0, s.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [&](std::string_view part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return detail::parse_double(part, text);
  };
  if (split == std::string_view::npos) return {0.0, imag_part(body)};
  return {detail::parse_double(body.substr(0, split), text), imag_part(body.substr(split))};
}

inline std::string format_scalar(const Rational& x) {
  const BigInt& den = boost::multiprecision::denominator(x);
  std::string out = boost::multiprecision::numerator(x).str();
  if (den != 1) out += "/" + den.str();
  return out;
}

inline std::string format_scalar(const Complex& z) {
  if (z.imag() == 0.0) return detail::format_double(z.real());
  std::string im = detail::format_double(z.imag());
  if (z.real() == 0.0) return im + "i";
  if (im.front() != '-') im = "+" + im;
  return detail::format_double(z.real()) + im + "i";
}

template <Field T>
T parse_scalar(std::string_view text) {
  if constexpr (std::is_same_v<T, Rational>)
    return parse_rational(text);
  else
    return parse_complex(text);
}

// ---------------------------------------------------------------------------
// Tagged scalar for code that does not know its domain statically.

class Scalar {
 public:
  Scalar(Rational r) : value_(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  Scalar(Complex z) : value_(z) {}              // NOLINT(google-explicit-constructor)

  Domain domain() const { return value_.index() == 0 ? Domain::rational : Domain::complex; }
  const Rational& rational() const { return std::get<Rational>(value_); }
  const Complex& complex() const { return std::get<Complex>(value_); }

  /// Explicit, lossy-flagged promotion to the complex domain.
  Promoted<Scalar> promoted() const {
    if (domain() == Domain::complex) return {*this, false};
    auto p = promote(rational());
    return {Scalar(p.value), p.lossy};
  }

  std::string str() const {
    return std::visit([](const auto& v) { return format_scalar(v); }, value_);
  }

  friend Scalar operator+(const Scalar& a, const Scalar& b) { return combine(a, b, std::plus<>{}); }
  friend Scalar operator-(const Scalar& a, const Scalar& b) { return combine(a, b, std::minus<>{}); }
  friend Scalar operator*(const Scalar& a, const Scalar& b) { return combine(a, b, std::multiplies<>{}); }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.is_zero()) throw InvalidParameters("division by zero");
    return combine(a, b, std::divides<>{});
  }
  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.domain() != b.domain()) throw DomainMismatch("comparing rational with complex scalar");
    return a.value_ == b.value_;
  }

  bool is_zero() const {
    return domain() == Domain::rational ? rational() == 0 : complex() == Complex{};
  }

  static Scalar parse(std::string_view text, Domain d) {
    if (d == Domain::rational) return Scalar(parse_rational(text));
    return Scalar(parse_complex(text));
  }

 private:
  template <class Op>
  static Scalar combine(const Scalar& a, const Scalar& b, Op op) {
    if (a.domain() != b.domain()) throw DomainMismatch("mixing rational and complex scalars");
    if (a.domain() == Domain::rational) return Scalar(Rational(op(a.rational(), b.rational())));
    return Scalar(Complex(op(a.complex(), b.complex())));
  }

  std::variant<Rational, Complex> value_;
};

}  // namespace evokit
