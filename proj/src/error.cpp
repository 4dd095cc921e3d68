#include "mlsc/error.hpp"

namespace mlsc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kSelfLoop: return "self_loop";
    case ErrorCode::kBounds: return "bounds_error";
    case ErrorCode::kParameter: return "parameter_error";
    case ErrorCode::kDimension: return "dimension_error";
    case ErrorCode::kContract: return "contract_error";
    case ErrorCode::kDegeneratePruning: return "degenerate_pruning";
    case ErrorCode::kDegenerateEmbedding: return "degenerate_embedding";
    case ErrorCode::kDetectionFailure: return "detection_failure";
    case ErrorCode::kConvergence: return "convergence_failure";
    case ErrorCode::kEmptyCommunity: return "empty_community";
    case ErrorCode::kSize: return "size_error";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown_error";
}

}  // namespace mlsc
