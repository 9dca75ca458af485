#include "floquet_pt/errors.hpp"

namespace fpt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OrderTooLow: return "OrderTooLow";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPTSymmetric: return "NotPTSymmetric";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::FrequencyTooLarge: return "FrequencyTooLarge";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ClusterAmbiguity: return "ClusterAmbiguity";
    case ErrorCode::ZeroIndex: return "ZeroIndex";
    case ErrorCode::IndexTooSmall: return "IndexTooSmall";
    case ErrorCode::WindowsOverlapWholeLine: return "WindowsOverlapWholeLine";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::IsolationLost: return "IsolationLost";
    case ErrorCode::MatchingAmbiguous: return "MatchingAmbiguous";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::LambdaTooLarge: return "LambdaTooLarge";
    case ErrorCode::EngineFailure: return "EngineFailure";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::OrderTooLow:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotPTSymmetric:
    case ErrorCode::OrderOutOfRange:
    case ErrorCode::FrequencyTooLarge:
    case ErrorCode::ZeroIndex:
    case ErrorCode::IndexTooSmall:
    case ErrorCode::TruncationTooSmall:
    case ErrorCode::ConfigError:
      return true;
    default:
      return false;
  }
}

}  // namespace fpt
