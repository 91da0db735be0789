#pragma once

#include <string>
#include <vector>

#include "kpeaks/core/vec3.hpp"
#include "kpeaks/limit/kirchhoff_limit.hpp"

namespace kpeaks::fields {

using limit::LocalShape;
using limit::WellData;

/// Multi-well potential
///   V(x) = V_bg + sum_i chi(|x - a_i|) (f_i(|x - a_i|) - V_bg) + sum_j g_j T tanh(x_j / T),
/// with chi a C-infinity step from 1 (t <= R0/2) to 0 (t >= 0.6 R0) and local shapes
///   quadratic:    f = V_i + min(kappa t^2, cap)
///   hoelder_cusp: f = V_i + min(kappa t^theta, cap)
///   flat_cap:     f = V_i + cap (1 - exp(-kappa t^2 / cap)).
struct PotentialModel
{
    std::string name;
    double background = 2.0;
    std::vector<WellData> wells;
    double curvature = 0.2;
    double cap = 10.0;
    /// Half the minimal well distance (or a preset radius for a single well).
    double r0 = 1.0;
    Vec3 tilt{0.0, 0.0, 0.0};
    double tilt_length = 2.0;

    double blend_radius() const
    {
        return 0.5 * r0;
    }
    double blend_width() const
    {
        return 0.1 * r0;
    }

    /// Throws Error(InvalidArgument) when the descriptor violates positivity or overlaps wells.
    void validate() const;
};

/// V(x).
double eval_potential(const PotentialModel& model, const Vec3& x);

/// grad V(x); throws Error(GradAtCusp) at the center of a cusp well.
Vec3 grad_potential(const PotentialModel& model, const Vec3& x);

/// Lower and upper bounds of V over R^3 derived from the descriptor.
struct PotentialBounds
{
    double lower;
    double upper;
};

PotentialBounds analytic_bounds(const PotentialModel& model);

/// Built-in models. Parameterized names take an argument in parentheses, e.g. "two_well_hoelder(0.5)".
PotentialModel make_preset(const std::string& name);

/// Names accepted by make_preset (argument forms shown with their default value).
std::vector<std::string> preset_names();

/// Point a_i + t d with V = V(a_i) + gap along the unit direction d (bisection in t).
Vec3 offset_for_gap(const PotentialModel& model, std::size_t well, const Vec3& direction, double gap);

} // namespace kpeaks::fields
