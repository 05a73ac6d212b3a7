#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evokit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
 public:
  SingularMatrix() : Error("matrix is singular") {}
  using Error::Error;
};

/// Two operands live in different scalar domains (rational vs complex).
class DomainMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroCoefficient : public Error {
 public:
  explicit ZeroCoefficient(std::size_t index)
      : Error("coefficient " + std::to_string(index + 1) + " is zero"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A reported (non-crashing) failure of an operation's hypotheses.
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

class DiagonalNotZero : public PreconditionFailed {
 public:
  DiagonalNotZero() : PreconditionFailed("diagonal coefficients a1, b2, c3 must vanish") {}
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// Input text could not be parsed; names the field and (when known) the line.
class ParseError : public Error {
 public:
  ParseError(std::string field, std::size_t line, const std::string& what)
      : Error(format(field, line, what)), field_(std::move(field)), line_(line) {}
  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, std::size_t line, const std::string& what) {
    std::string out = "parse error";
    if (!field.empty()) out += " in field '" + field + "'";
    if (line > 0) out += " at line " + std::to_string(line);
    return out + ": " + what;
  }

  std::string field_;
  std::size_t line_;
};

}  // namespace evokit
