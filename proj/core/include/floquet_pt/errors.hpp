#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fpt {

enum class ErrorCode {
  InvalidArgument,
  OrderTooLow,
  DimensionMismatch,
  NotPTSymmetric,
  OrderOutOfRange,
  FrequencyTooLarge,
  NoConvergence,
  ClusterAmbiguity,
  ZeroIndex,
  IndexTooSmall,
  WindowsOverlapWholeLine,
  TruncationTooSmall,
  NotConverged,
  IsolationLost,
  MatchingAmbiguous,
  StepSizeUnderflow,
  ToleranceNotMet,
  LambdaTooLarge,
  EngineFailure,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// machine-readable part; what() carries a one-line diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// True for errors caused by malformed user input rather than numerics.
bool is_input_error(ErrorCode code) noexcept;

}  // namespace fpt
