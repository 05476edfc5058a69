#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace commentqc {

enum class Errc {
  // csv / corpus
  MissingColumn,
  UnparsableLabel,
  DuplicateId,
  MalformedRow,
  TooFewSamples,
  EmptyCorpus,
  // vectorize
  EmptyVocabulary,
  // models
  DimensionMismatch,
  DegenerateLabels,
  NonFiniteLoss,
  BadHyperparameter,
  BadModelFile,
  // evaluate
  LengthMismatch,
  EmptyInput,
  // io / http
  IoError,
  HttpError,
  RateLimited,
  NotFound,
  // catch-all for violated preconditions
  InvalidArgument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::UnparsableLabel: return "UnparsableLabel";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::EmptyVocabulary: return "EmptyVocabulary";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DegenerateLabels: return "DegenerateLabels";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::BadHyperparameter: return "BadHyperparameter";
    case Errc::BadModelFile: return "BadModelFile";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::IoError: return "IoError";
    case Errc::HttpError: return "HttpError";
    case Errc::RateLimited: return "RateLimited";
    case Errc::NotFound: return "NotFound";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Library-wide exception type. `code()` identifies the failure class so
/// callers can branch without parsing message text.
class Error : public std::runtime_error {
public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code), detail_(std::move(message)) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] inline void raise(Errc code, std::string message) {
  throw Error(code, std::move(message));
}

} // namespace commentqc
