#pragma once

#include <string>
#include <vector>

#include "evokit/algebra.hpp"

namespace evokit {

/// The six non-abelian 2-dimensional complex evolution algebras, plus the abelian one.
///   E1: e1e1 = e1                     E4: e1e1 = e2
///   E2: e1e1 = e1, e2e2 = e1          E5(a2,a3): e1e1 = e1 + a2 e2, e2e2 = a3 e1 + e2, 1 - a2 a3 != 0
///   E3: e1e1 = e1+e2, e2e2 = -e1-e2   E6(a4): e1e1 = e2, e2e2 = e1 + a4 e2
enum class Class2D { E1, E2, E3, E4, E5, E6, Abelian };

inline const char* to_string(Class2D c) {
  switch (c) {
    case Class2D::E1: return "E1";
    case Class2D::E2: return "E2";
    case Class2D::E3: return "E3";
    case Class2D::E4: return "E4";
    case Class2D::E5: return "E5";
    case Class2D::E6: return "E6";
    case Class2D::Abelian: return "Abelian";
  }
  return "?";
}

inline std::size_t parameter_count(Class2D c) {
  return c == Class2D::E5 ? 2 : c == Class2D::E6 ? 1 : 0;
}

template <Field T>
EvolutionAlgebra<T> two_dim_algebra(Class2D c, const std::vector<T>& params = {}) {
  if (params.size() != parameter_count(c))
    throw InvalidParameters(std::string(to_string(c)) + " takes " + std::to_string(parameter_count(c)) +
                            " parameter(s)");
  Matrix<T> a(2, 2);
  switch (c) {
    case Class2D::E1: a(0, 0) = T(1); break;
    case Class2D::E2: a(0, 0) = T(1); a(1, 0) = T(1); break;
    case Class2D::E3:
      a(0, 0) = T(1); a(0, 1) = T(1);
      a(1, 0) = T(-1); a(1, 1) = T(-1);
      break;
    case Class2D::E4: a(0, 1) = T(1); break;
    case Class2D::E5:
      if (T(T(1) - params[0] * params[1]) == T(0)) throw InvalidParameters("E5 requires 1 - a2 a3 != 0");
      a(0, 0) = T(1); a(0, 1) = params[0];
      a(1, 0) = params[1]; a(1, 1) = T(1);
      break;
    case Class2D::E6:
      a(0, 1) = T(1);
      a(1, 0) = T(1); a(1, 1) = params[0];
      break;
    case Class2D::Abelian: break;
  }
  return EvolutionAlgebra<T>(std::move(a));
}

}  // namespace evokit
