#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bcpg {

enum class ErrorCode {
  InvalidArgument,
  NotConnected,
  Inconsistent,
  PoleHit,
  OutOfRange,
  BadBounds,
  OnBoundary,
  NoSolution,
  SaturationEscape,
  BudgetExceeded,
  SignMismatch,
  BoundExhausted,
  InfeasibleOrdering,
  CannotSeparate,
  PoleApproach,
  InvarianceViolated,
  Schema,
};

std::string_view to_string(ErrorCode code);

/// Base of every exception raised by the library. The code identifies the
/// failure class so front ends can map it to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bcpg
