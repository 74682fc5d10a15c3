#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wdflow {

enum class ErrorCode {
  kMalformedCorpus,
  kUnknownSplit,
  kUnknownDomainTag,
  kInvalidDomain,
  kStrictViolation,
  kEmptyDialogue,
  kNotAnActionTurn,
  kMissingGoldFields,
  kProviderUnavailable,
  kMalformedResponse,
  kIdMismatch,
  kUnknownStep,
  kBackendTimeout,
  kUnknownId,
  kMissingPrediction,
  kInvalidConfig,
  kIo,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedCorpus: return "MalformedCorpus";
    case ErrorCode::kUnknownSplit: return "UnknownSplit";
    case ErrorCode::kUnknownDomainTag: return "UnknownDomainTag";
    case ErrorCode::kInvalidDomain: return "InvalidDomain";
    case ErrorCode::kStrictViolation: return "StrictViolation";
    case ErrorCode::kEmptyDialogue: return "EmptyDialogue";
    case ErrorCode::kNotAnActionTurn: return "NotAnActionTurn";
    case ErrorCode::kMissingGoldFields: return "MissingGoldFields";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kUnknownStep: return "UnknownStep";
    case ErrorCode::kBackendTimeout: return "BackendTimeout";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kMissingPrediction: return "MissingPrediction";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wdflow
