#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace omtube {

enum class ErrorKind {
  // input / validation
  InvalidInput,
  MetastabilityViolation,
  DomainTooSmall,
  BadNoise,
  BadTube,
  PathTooShort,
  IncompatibleGrids,
  GridMismatch,
  // numerical
  NewtonDivergence,
  HorizonTooShort,
  QuadratureFailure,
  NoBracket,
  NoConvergence,
  NoInteriorMinimum,
  NoSignChange,
  MultipleRoots,
  EnergyDrift,
  PathFailures,
  Io,
};

enum class ErrorCategory { Validation, Numerical };

std::string_view to_string(ErrorKind kind) noexcept;
ErrorCategory category(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` says what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return omtube::category(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace omtube
