#include "omtube/error.hpp"

namespace omtube {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::MetastabilityViolation: return "MetastabilityViolation";
    case ErrorKind::DomainTooSmall: return "DomainTooSmall";
    case ErrorKind::BadNoise: return "BadNoise";
    case ErrorKind::BadTube: return "BadTube";
    case ErrorKind::PathTooShort: return "PathTooShort";
    case ErrorKind::IncompatibleGrids: return "IncompatibleGrids";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::HorizonTooShort: return "HorizonTooShort";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NoInteriorMinimum: return "NoInteriorMinimum";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::MultipleRoots: return "MultipleRoots";
    case ErrorKind::EnergyDrift: return "EnergyDrift";
    case ErrorKind::PathFailures: return "PathFailures";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

ErrorCategory category(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::MetastabilityViolation:
    case ErrorKind::DomainTooSmall:
    case ErrorKind::BadNoise:
    case ErrorKind::BadTube:
    case ErrorKind::PathTooShort:
    case ErrorKind::IncompatibleGrids:
    case ErrorKind::GridMismatch:
      return ErrorCategory::Validation;
    default:
      return ErrorCategory::Numerical;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace omtube
