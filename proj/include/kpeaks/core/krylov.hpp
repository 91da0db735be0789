#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace kpeaks {

using Vector = std::vector<double>;

/// y = Op(x); y is preallocated with the size of x.
using LinearOperator = std::function<void(const Vector& x, Vector& y)>;

struct KrylovResult
{
    int iterations = 0;
    /// Preconditioned residual norm relative to its initial value.
    double relative_residual = 0.0;
    bool converged = false;
};

/// Preconditioned MINRES for a symmetric (possibly indefinite) operator and an SPD preconditioner.
/// Starts from the incoming x.
KrylovResult minres(const LinearOperator& A, const LinearOperator& precond, const Vector& b, Vector& x, double rtol,
                    int max_iterations);

/// Preconditioned conjugate gradients for an SPD operator. Starts from the incoming x.
KrylovResult pcg(const LinearOperator& A, const LinearOperator& precond, const Vector& b, Vector& x, double rtol,
                 int max_iterations);

} // namespace kpeaks
