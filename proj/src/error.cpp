#include "cyclestat/error.hpp"

namespace cyclestat {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidJson: return "InvalidJson";
    case ErrorCode::EmptyFrame: return "EmptyFrame";
    case ErrorCode::MalformedKeypoints: return "MalformedKeypoints";
    case ErrorCode::AllJointsMissing: return "AllJointsMissing";
    case ErrorCode::NoFrames: return "NoFrames";
    case ErrorCode::GapTooLong: return "GapTooLong";
    case ErrorCode::DegenerateTorso: return "DegenerateTorso";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidGram: return "InvalidGram";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::TemplateTooLong: return "TemplateTooLong";
    case ErrorCode::TemplateTooShort: return "TemplateTooShort";
    case ErrorCode::SequenceTooShort: return "SequenceTooShort";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TooLongForOracle: return "TooLongForOracle";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::PathMismatch: return "PathMismatch";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NoMinima: return "NoMinima";
    case ErrorCode::TooFewCycles: return "TooFewCycles";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::BarycenterNonConvergence: return "BarycenterNonConvergence";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoMinima:
    case ErrorCode::TooFewCycles:
      return ErrorCategory::Structure;
    case ErrorCode::EigenFailure:
    case ErrorCode::BarycenterNonConvergence:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Input;
  }
}

}  // namespace cyclestat
