#include "koopsub/errors.hpp"

namespace koopsub {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_matrix: return "InvalidMatrix";
    case ErrorCode::invalid_input: return "InvalidInput";
    case ErrorCode::precondition_violation: return "PreconditionViolation";
    case ErrorCode::internal_error: return "InternalError";
    case ErrorCode::degenerate_dictionary: return "DegenerateDictionary";
    case ErrorCode::signature_rank: return "SignatureRankError";
    case ErrorCode::abort_round: return "AbortRound";
    case ErrorCode::no_termination: return "NoTermination";
    case ErrorCode::numerical_error: return "NumericalError";
    case ErrorCode::degenerate_eigenfunction: return "DegenerateEigenfunction";
    case ErrorCode::degenerate_observable: return "DegenerateObservable";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace koopsub
