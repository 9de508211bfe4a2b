#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace origami {

enum class ErrorKind {
  NotBijective,
  NotTransitive,
  SizeMismatch,
  NotUnimodular,
  CapExceeded,
  OutOfRange,
  NonPositiveQuotient,
  ConeVertexInInterior,
  StartAtConeVertex,
  ArithmeticOverflow,
  WordTooShort,
  ParallelToDecomposition,
  PreconditionViolated,
  StartOnSingularLeaf,
  CapTooSmall,
  BudgetExceeded,
  ExponentTooSmall,
  InsufficientSpan,
  Parse,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace origami
