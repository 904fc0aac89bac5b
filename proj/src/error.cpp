#include "uaradar/error.hpp"

namespace uaradar {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DigestMismatch: return "DigestMismatch";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::PageUrlMismatch: return "PageUrlMismatch";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::EmptyTree: return "EmptyTree";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::PhaseMismatch: return "PhaseMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingEvidence: return "MissingEvidence";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::IncompleteEntry: return "IncompleteEntry";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(std::string(to_string(code)) +
                         (detail.empty() ? "" : ": " + detail)),
      code_(code),
      detail_(std::move(detail)) {}

}  // namespace uaradar
