#include "texlayer/error.hpp"

namespace texlayer {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kMissingUVs: return "missing_uvs";
    case ErrorCode::kEmptyMesh: return "empty_mesh";
    case ErrorCode::kCapacityExceeded: return "capacity_exceeded";
    case ErrorCode::kTargetMismatch: return "target_mismatch";
    case ErrorCode::kUnknownTable: return "unknown_table";
    case ErrorCode::kBadMagic: return "bad_magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported_version";
    case ErrorCode::kTruncatedStream: return "truncated_stream";
    case ErrorCode::kChecksumMismatch: return "checksum_mismatch";
    case ErrorCode::kDegenerateCamera: return "degenerate_camera";
    case ErrorCode::kStaleDepth: return "stale_depth";
    case ErrorCode::kLayerMeshMismatch: return "layer_mesh_mismatch";
    case ErrorCode::kMemoryBudgetExceeded: return "memory_budget_exceeded";
    case ErrorCode::kDuplicateTable: return "duplicate_table";
    case ErrorCode::kBadSchema: return "bad_schema";
    case ErrorCode::kSchemaViolation: return "schema_violation";
    case ErrorCode::kReservedKey: return "reserved_key";
    case ErrorCode::kBindFailure: return "bind_failure";
    case ErrorCode::kBadRequest: return "bad_request";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kIoError: return "io_error";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace texlayer
