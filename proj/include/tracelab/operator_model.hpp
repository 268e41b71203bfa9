#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "tracelab/seq_core.hpp"

namespace tracelab {

enum class OperatorKind { diagonal_positive, self_adjoint, general };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::diagonal_positive: return "diagonal-positive";
    case OperatorKind::self_adjoint: return "self-adjoint";
    case OperatorKind::general: return "general";
  }
  return "?";
}

// An operator seen only through its eigenvalue sequence, ordered by
// nonincreasing modulus. An attached singular-value profile is carried for
// reporting and never enters a trace computation.
struct OperatorModel {
  std::string label;
  OperatorKind kind = OperatorKind::general;
  AnySequence eigen_seq;
  std::optional<RealSequence> singular_values;

  bool is_complex() const { return std::holds_alternative<ComplexSequence>(eigen_seq); }
};

// Checks the modulus ordering on the pointwise-evaluable prefix.
template <class T>
void check_nonincreasing_modulus(const BlockSequence<T>& s, std::uint64_t count = 4096) {
  if (!s.has_values()) return;
  std::uint64_t n = std::min<std::uint64_t>(count, s.value_horizon());
  double prev = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < n; ++k) {
    double m = modulus(s.value_at(k));
    if (m > prev * (1.0 + 1e-12))
      throw precondition_error("operator model '" + s.name() + "': eigenvalue moduli increase at index " +
                               std::to_string(k));
    prev = m;
  }
}

template <class T>
OperatorModel make_operator(std::string label, OperatorKind kind, BlockSequence<T> eigen) {
  check_nonincreasing_modulus(eigen);
  return OperatorModel{std::move(label), kind, AnySequence(std::move(eigen)), std::nullopt};
}

}  // namespace tracelab
