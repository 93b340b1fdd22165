#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace safe_rl {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kInfeasibleBaseline,
  kInfeasible,
  kNumerical,
  kInvariantViolation,
  kStepAfterDone,
  kEmptyBuffer,
  kInvalidConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInfeasibleBaseline: return "infeasible baseline";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kNumerical: return "numerical error";
    case ErrorCode::kInvariantViolation: return "invariant violation";
    case ErrorCode::kStepAfterDone: return "step after done";
    case ErrorCode::kEmptyBuffer: return "empty buffer";
    case ErrorCode::kInvalidConfig: return "invalid config";
    case ErrorCode::kIo: return "io error";
  }
  return "unknown";
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

inline void require_same_size(long a, long b, const std::string& what) {
  if (a != b) {
    throw Error(ErrorCode::kDimensionMismatch,
                what + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace safe_rl
