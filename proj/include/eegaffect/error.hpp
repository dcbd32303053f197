#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eegaffect {

enum class ErrorCode {
  MissingManifest,
  DimensionMismatch,
  RatingOutOfRange,
  NonFiniteSample,
  ChannelNotFound,
  DuplicateChannel,
  UnknownChannel,
  DuplicateTrial,
  EmptySignal,
  InvalidSpec,
  InfeasibleSpec,
  ConvergenceFailure,
  FrequencyOutOfRange,
  SignalTooShort,
  SampleRateMismatch,
  DegenerateSignal,
  MissingBandSignal,
  ZeroPowerBand,
  LayoutMismatch,
  MissingRating,
  EmptyAfterExclusion,
  SingleClassDataset,
  ConstantFeature,
  NotBinaryModel,
  TooFewInstances,
  SingleClassLabels,
  ParseError,
  IoError,
  ConfigError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RatingOutOfRange: return "RatingOutOfRange";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::ChannelNotFound: return "ChannelNotFound";
    case ErrorCode::DuplicateChannel: return "DuplicateChannel";
    case ErrorCode::UnknownChannel: return "UnknownChannel";
    case ErrorCode::DuplicateTrial: return "DuplicateTrial";
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::FrequencyOutOfRange: return "FrequencyOutOfRange";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::SampleRateMismatch: return "SampleRateMismatch";
    case ErrorCode::DegenerateSignal: return "DegenerateSignal";
    case ErrorCode::MissingBandSignal: return "MissingBandSignal";
    case ErrorCode::ZeroPowerBand: return "ZeroPowerBand";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::MissingRating: return "MissingRating";
    case ErrorCode::EmptyAfterExclusion: return "EmptyAfterExclusion";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::ConstantFeature: return "ConstantFeature";
    case ErrorCode::NotBinaryModel: return "NotBinaryModel";
    case ErrorCode::TooFewInstances: return "TooFewInstances";
    case ErrorCode::SingleClassLabels: return "SingleClassLabels";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code;
/// the message holds the human-readable context (file, channel, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail = {}) {
  throw Error(code, detail);
}

}  // namespace eegaffect
