#include "shadowkit/error.hpp"

namespace shadowkit {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::OrderingViolated: return "OrderingViolated";
    case ErrorKind::NoRealRoots: return "NoRealRoots";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::RequiresB1Zero: return "RequiresB1Zero";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::X0OutOfRange: return "X0OutOfRange";
    case ErrorKind::Unbalanced: return "Unbalanced";
    case ErrorKind::NegativeEnergy: return "NegativeEnergy";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::LeftDomain: return "LeftDomain";
    case ErrorKind::Blowup: return "Blowup";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::Indeterminate: return "Indeterminate";
    case ErrorKind::SeedFailure: return "SeedFailure";
    case ErrorKind::SeedRejected: return "SeedRejected";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

ErrorClass classify(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
      return ErrorClass::Config;
    case ErrorKind::InvalidParams:
    case ErrorKind::OrderingViolated:
    case ErrorKind::NoRealRoots:
    case ErrorKind::NotPositive:
    case ErrorKind::RequiresB1Zero:
    case ErrorKind::Degenerate:
    case ErrorKind::HypothesisFailed:
    case ErrorKind::X0OutOfRange:
    case ErrorKind::Unbalanced:
    case ErrorKind::NegativeEnergy:
      return ErrorClass::Model;
    default:
      return ErrorClass::Solver;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace shadowkit
