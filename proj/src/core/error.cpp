#include "kpeaks/core/error.hpp"

namespace kpeaks {

const char*
to_string(ErrorCode code)
{
    switch (code) {
        case ErrorCode::NoSignChange:
            return "NoSignChange";
        case ErrorCode::MaxIterations:
            return "MaxIterations";
        case ErrorCode::ResidualTooLarge:
            return "ResidualTooLarge";
        case ErrorCode::GradAtCusp:
            return "GradAtCusp";
        case ErrorCode::BoxTooSmall:
            return "BoxTooSmall";
        case ErrorCode::BackendMismatch:
            return "BackendMismatch";
        case ErrorCode::NoConvergence:
            return "NoConvergence";
        case ErrorCode::UnresolvedPeak:
            return "UnresolvedPeak";
        case ErrorCode::NewtonDiverged:
            return "NewtonDiverged";
        case ErrorCode::ConstraintDrift:
            return "ConstraintDrift";
        case ErrorCode::BoundaryMinimum:
            return "BoundaryMinimum";
        case ErrorCode::InvalidArgument:
            return "InvalidArgument";
        case ErrorCode::ConfigError:
            return "ConfigError";
        case ErrorCode::InvariantViolation:
            return "InvariantViolation";
    }
    return "Unknown";
}

} // namespace kpeaks
