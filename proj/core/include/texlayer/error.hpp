#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace texlayer {

/// Stable error identifiers. The snake_case spelling returned by
/// error_code_name() is part of the wire protocol and must not change.
enum class ErrorCode {
  kParseError,
  kMissingUVs,
  kEmptyMesh,
  kCapacityExceeded,
  kTargetMismatch,
  kUnknownTable,
  kBadMagic,
  kUnsupportedVersion,
  kTruncatedStream,
  kChecksumMismatch,
  kDegenerateCamera,
  kStaleDepth,
  kLayerMeshMismatch,
  kMemoryBudgetExceeded,
  kDuplicateTable,
  kBadSchema,
  kSchemaViolation,
  kReservedKey,
  kBindFailure,
  kBadRequest,
  kInvalidArgument,
  kNotFound,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace texlayer
