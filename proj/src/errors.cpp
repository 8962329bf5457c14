#include "qgraph/errors.hpp"

namespace qgraph {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::UnsupportedConfiguration: return "UnsupportedConfiguration";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MeshTooFine: return "MeshTooFine";
        case ErrorCode::InvalidH: return "InvalidH";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::SingularShift: return "SingularShift";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::BadQuantumNumbers: return "BadQuantumNumbers";
        case ErrorCode::UnknownPreset: return "UnknownPreset";
        case ErrorCode::TooFewEigenvalues: return "TooFewEigenvalues";
        case ErrorCode::OutOfResolvedRange: return "OutOfResolvedRange";
        case ErrorCode::UnsatisfiableConstraint: return "UnsatisfiableConstraint";
        case ErrorCode::NoDiagonal: return "NoDiagonal";
        case ErrorCode::NonSymmetricProblem: return "NonSymmetricProblem";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace qgraph
