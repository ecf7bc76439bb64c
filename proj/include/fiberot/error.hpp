#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fiberot {

enum class ErrorCode {
  AllZeroMass,
  NegativeWeight,
  IndexOutOfRange,
  BaseMismatch,
  FiberMismatch,
  SupportOutOfRange,
  DegenerateInput,
  TooLarge,
  InvalidCost,
  InvalidConfig,
  InvalidProblem,
  SupportViolation,
  EmptySupport,
  LPInfeasible,
  NotSolved,
  ShapeMismatch,
  ParseError,
  NumericalFailure,
};

std::string_view to_string(ErrorCode code);

/// All library failures surface as this exception; `code()` identifies the
/// failure class and `what()` carries the location.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fiberot
