#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cyclestat {

enum class ErrorCode {
  // input
  InvalidJson,
  EmptyFrame,
  MalformedKeypoints,
  AllJointsMissing,
  NoFrames,
  GapTooLong,
  DegenerateTorso,
  InvalidModel,
  InvalidGram,
  DimensionMismatch,
  EmptySequence,
  TemplateTooLong,
  TemplateTooShort,
  SequenceTooShort,
  InvalidConfig,
  TooLongForOracle,
  LengthMismatch,
  PathMismatch,
  EmptyList,
  EmptySet,
  // structure
  NoMinima,
  TooFewCycles,
  // numeric
  EigenFailure,
  BarycenterNonConvergence,
};

std::string_view to_string(ErrorCode code) noexcept;

enum class ErrorCategory { Input, Structure, Numeric };

ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace cyclestat
