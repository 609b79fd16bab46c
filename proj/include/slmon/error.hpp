#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slmon {

enum class ErrorCode {
  AdditivityViolation,
  BaseRateViolation,
  RangeViolation,
  DimensionMismatch,
  DogmaticOpinion,
  BaseRateMismatch,
  NegativeEvidence,
  NonFiniteValue,
  DomainMismatch,
  MissingSystem,
  ParseError,
  NonMonotonicTime,
  TooFewSamples,
  OutOfRange,
  RelativeKindUnsupported,
  MissingOverlap,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AdditivityViolation: return "AdditivityViolation";
    case ErrorCode::BaseRateViolation: return "BaseRateViolation";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DogmaticOpinion: return "DogmaticOpinion";
    case ErrorCode::BaseRateMismatch: return "BaseRateMismatch";
    case ErrorCode::NegativeEvidence: return "NegativeEvidence";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::MissingSystem: return "MissingSystem";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::RelativeKindUnsupported: return "RelativeKindUnsupported";
    case ErrorCode::MissingOverlap: return "MissingOverlap";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code, so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace slmon
