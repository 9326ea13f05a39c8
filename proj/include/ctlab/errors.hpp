#pragma once

#include <stdexcept>
#include <string>

namespace ctlab {

// One exception type for the whole library; the code tells callers (and the
// CLI exit-code mapping) which contract was violated.
enum class ErrorCode {
    DisconnectedGraph,
    NonPositiveWeight,
    SelfLoop,
    DuplicateEdge,
    InvalidVertex,
    MalformedFile,
    IoFailure,
    EmptyGraph,
    InvalidParameters,
    RejectionBudgetExceeded,
    NotCritical,
    BudgetExceeded,
    NumericalFailure,
    NotACutset,
    OverlappingCutsets,
    TooFewCenters,
    StepBudgetExceeded,
    InsufficientData,
    DegenerateField,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

} // namespace ctlab
