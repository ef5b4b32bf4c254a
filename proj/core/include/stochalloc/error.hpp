#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stochalloc {

enum class ErrorCode {
  kDisconnectedGraph,
  kInvalidEdge,
  kInvalidTask,
  kNotNeighbors,
  kDimensionMismatch,
  kInfeasible,
  kNonFiniteState,
  kSingularSystem,
  kStateSpaceTooLarge,
  kInvalidInitialState,
  kInvalidTimestep,
  kOutOfRange,
  kBurnInTooLate,
  kEmptySamples,
  kInvalidDistribution,
  kParseError,
  kValidationError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace stochalloc
