#pragma once

#include <stdexcept>
#include <string>

namespace shadowkit {

enum class ErrorKind {
  // model / analytic preconditions
  InvalidParams,
  OrderingViolated,
  NoRealRoots,
  NotPositive,
  RequiresB1Zero,
  Degenerate,
  HypothesisFailed,
  X0OutOfRange,
  Unbalanced,
  NegativeEnergy,
  // numerics
  DimensionMismatch,
  SingularJacobian,
  NoConvergence,
  LeftDomain,
  Blowup,
  ConvergenceFailure,
  Indeterminate,
  SeedFailure,
  SeedRejected,
  InsufficientData,
  // front-end
  ConfigError,
};

enum class ErrorClass { Config, Model, Solver };

const char* to_string(ErrorKind kind);
ErrorClass classify(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace shadowkit
