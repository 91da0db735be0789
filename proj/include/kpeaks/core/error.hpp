#pragma once

#include <stdexcept>
#include <string>

namespace kpeaks {

/// Failure categories reported by the solvers; the CLI maps them to exit codes.
enum class ErrorCode
{
    NoSignChange,
    MaxIterations,
    ResidualTooLarge,
    GradAtCusp,
    BoxTooSmall,
    BackendMismatch,
    NoConvergence,
    UnresolvedPeak,
    NewtonDiverged,
    ConstraintDrift,
    BoundaryMinimum,
    InvalidArgument,
    ConfigError,
    InvariantViolation
};

const char* to_string(ErrorCode code);

/// Exception carrying an ErrorCode.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    ErrorCode code() const noexcept
    {
        return code_;
    }

  private:
    ErrorCode code_;
};

inline void
require(bool condition, const std::string& what)
{
    if (!condition) {
        throw Error(ErrorCode::InvalidArgument, what);
    }
}

} // namespace kpeaks
