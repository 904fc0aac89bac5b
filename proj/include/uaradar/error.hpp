#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uaradar {

enum class ErrorCode {
  MissingManifest,
  SchemaViolation,
  DigestMismatch,
  MissingFile,
  PageUrlMismatch,
  EmptyDocument,
  EmptyTree,
  InstanceTooLarge,
  DecodeError,
  ConfigMismatch,
  PhaseMismatch,
  EmptyInput,
  IoError,
  MissingEvidence,
  ArityMismatch,
  IncompleteEntry,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// All toolkit failures surface as this exception. `detail()` carries the
// offending field, path, or config so callers can report without parsing
// what().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace uaradar
