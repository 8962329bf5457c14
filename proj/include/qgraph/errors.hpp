#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

/// Stable error codes; the CLI maps them 1:1 onto process exit codes.
enum class ErrorCode : int {
    SchemaError = 10,
    ValidationError = 11,
    UnsupportedConfiguration = 12,
    DimensionMismatch = 13,
    MeshTooFine = 14,
    InvalidH = 15,
    NotPositiveDefinite = 16,
    SingularShift = 17,
    NoConvergence = 18,
    BadQuantumNumbers = 19,
    UnknownPreset = 20,
    TooFewEigenvalues = 21,
    OutOfResolvedRange = 22,
    UnsatisfiableConstraint = 23,
    NoDiagonal = 24,
    NonSymmetricProblem = 25,
    IoError = 26,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace qgraph
