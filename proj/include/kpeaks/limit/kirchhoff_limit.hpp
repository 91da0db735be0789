#pragma once

#include <filesystem>
#include <vector>

#include "kpeaks/core/vec3.hpp"
#include "kpeaks/radial/profile.hpp"
#include "kpeaks/radial/shooting.hpp"

namespace kpeaks::limit {

/// Coefficients of -(eps^2 a + eps b int|grad u|^2) Delta u + V u = u^p.
struct ProblemParams
{
    double a = 1.0;
    double b = 0.0;
    double p = 3.0;

    /// Throws Error(InvalidArgument) unless a > 0, b >= 0 and 1 < p < 5.
    void validate() const;
};

enum class LocalShape
{
    quadratic,
    hoelder_cusp,
    flat_cap
};

/// One potential well: location a_i, depth V(a_i) and local shape near the minimum.
struct WellData
{
    Vec3 center{0.0, 0.0, 0.0};
    double value = 1.0;
    double hoelder_theta = 1.0;
    LocalShape local_shape = LocalShape::quadratic;
};

/// Throws Error(InvalidArgument) for an empty list, non-positive depths or coincident centers.
void validate_wells(const std::vector<WellData>& wells);

/// Positive root c of c = a + b_bar sqrt(c): sqrt(c) = (b_bar + sqrt(b_bar^2 + 4a)) / 2.
double solve_scaling(double a, double b_bar);

/// Limit profiles w^i = Q^i(. / sqrt(c)) sharing c = a + b sum_i int|grad w^i|^2.
struct LimitSystemSolution
{
    ProblemParams params;
    std::vector<WellData> wells;
    /// Ground states at lambda = V(a_i).
    std::vector<radial::RadialProfile> q_profiles;
    /// Rescaled profiles solving -c Delta w + V(a_i) w = w^p.
    std::vector<radial::RadialProfile> w_profiles;
    std::vector<double> q_grad_sq;
    std::vector<double> w_grad_sq;
    double b_bar = 0.0;
    double c = 1.0;
    /// |c - a - b sum int|grad w^i|^2| / c.
    double consistency = 0.0;

    std::size_t size() const
    {
        return wells.size();
    }
};

/// Solves the coupled limit system through the scaling reduction.
///
/// Shooting failures are rethrown with the well index prepended; a self-consistency defect
/// above \p tol (relative to c) raises Error(InvariantViolation).
LimitSystemSolution build_limit_system(const ProblemParams& params,
                                       const std::vector<WellData>& wells,
                                       double tol = 1e-8,
                                       const radial::ShootingOptions& shooting = {});

/// Per-component sup residual |-c Delta w^i + V(a_i) w^i - (w^i)^p| on a uniform verification
/// grid that is independent of the profile grid.
std::vector<double> system_residual(const LimitSystemSolution& sol);

/// Residual of a single profile against -c Delta w + lambda w = w^p on the verification grid.
double verification_residual(const radial::RadialProfile& w, double c, double lambda, double p);

/// Solution U of -(a + b int|grad U|^2) Delta U + V(a_i) U = U^p for one isolated well.
struct SingleWellProfile
{
    radial::RadialProfile profile;
    double c = 1.0;
    double grad_sq = 0.0;
};

SingleWellProfile solve_single_kirchhoff(const ProblemParams& params,
                                         const WellData& well,
                                         const radial::ShootingOptions& shooting = {});

/// Isolated-well solutions for every well plus K_i = sum_{j != i} int|grad U^(j)|^2.
struct SingleKirchhoffSolution
{
    std::vector<SingleWellProfile> wells;
    std::vector<double> K;
};

SingleKirchhoffSolution solve_single_kirchhoff_all(const ProblemParams& params,
                                                   const std::vector<WellData>& wells,
                                                   const radial::ShootingOptions& shooting = {});

/// JSON summary {a, b, p, wells[], b_bar, c, per_well[{lambda, u0, grad_norm_sq, residual}]}.
void write_limit_summary(const LimitSystemSolution& sol, const std::filesystem::path& path);

} // namespace kpeaks::limit
