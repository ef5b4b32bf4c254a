#include "stochalloc/error.hpp"

namespace stochalloc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kInvalidEdge: return "InvalidEdge";
    case ErrorCode::kInvalidTask: return "InvalidTask";
    case ErrorCode::kNotNeighbors: return "NotNeighbors";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kNonFiniteState: return "NonFiniteState";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kStateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::kInvalidInitialState: return "InvalidInitialState";
    case ErrorCode::kInvalidTimestep: return "InvalidTimestep";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kBurnInTooLate: return "BurnInTooLate";
    case ErrorCode::kEmptySamples: return "EmptySamples";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace stochalloc
