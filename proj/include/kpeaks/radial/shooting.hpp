#pragma once

#include <vector>

#include "kpeaks/radial/profile.hpp"

namespace kpeaks::radial {

/// Controls for the ground-state shooting solver.
struct ShootingOptions
{
    /// Target sup-norm of the ODE residual on the grid, in units of max(1, lambda^(p/(p-1))).
    double tol = 5e-9;
    int max_iterations = 200;
    /// Geometric grid in units of 1/sqrt(lambda).
    double first_spacing = 5e-3;
    double ratio = 1.01;
    double r_max = 30.0;
    /// Outward integration is trusted until u drops below this fraction of u(0).
    double match_fraction = 0.05;
    /// The tail model is fitted where u first drops below this fraction of u(0).
    double tail_fraction = 1e-8;
    /// Skip the residual gate (used when probing loose tolerances).
    bool enforce_residual = true;
};

/// Positive radial ground state of -Q'' - (2/r) Q' + lambda Q = Q^p on [0, inf).
///
/// Throws Error(NoSignChange) when no undershoot/overshoot bracket is found,
/// Error(MaxIterations) when bisection does not converge and Error(ResidualTooLarge)
/// when the assembled profile misses the residual target.
RadialProfile solve_ground_state(double lambda, double p, const ShootingOptions& options = {});

/// |-c (u'' + 2u'/r) + lambda u - u^p| at interior nodes, with both derivatives taken from the
/// stored values by nine-point stencils (even extension at r = 0); entries 0 and N-1 are zero.
std::vector<double> ode_residual(const RadialProfile& profile);

/// Maximum of ode_residual().
double ode_residual_sup(const RadialProfile& profile);

} // namespace kpeaks::radial
