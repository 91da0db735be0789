#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kpeaks/core/vec3.hpp"
#include "kpeaks/fields/field3d.hpp"
#include "kpeaks/limit/kirchhoff_limit.hpp"
#include "kpeaks/radial/profile.hpp"

namespace kpeaks::fields {

/// D_delta = closed balls of radius delta around the well centers.
struct PeakDomain
{
    double delta = 0.0;
    std::vector<Vec3> centers;

    /// delta = min(0.24 min|a_i - a_j|, 0.5); 0.5 for a single well.
    static PeakDomain preset(const std::vector<Vec3>& centers);

    /// Throws Error(InvalidArgument) unless 0 < delta < min|a_i - a_j| / 4.
    void validate() const;

    bool contains(const std::vector<Vec3>& Y) const;

    /// min_i (delta - |y^i - a_i|); negative outside D_delta.
    double margin(const std::vector<Vec3>& Y) const;
};

/// Value, gradient and Laplacian of a field at one point.
struct FieldSample
{
    double value = 0.0;
    Vec3 grad{0.0, 0.0, 0.0};
    double laplacian = 0.0;
};

/// Analytic sum of translated, eps-scaled radial profiles: amplitude * sum_i w_i(|x - y_i| / eps).
class PeakSet
{
  public:
    PeakSet() = default;
    PeakSet(double eps, std::vector<Vec3> centers, std::vector<radial::RadialProfile> profiles, double amplitude = 1.0);

    FieldSample eval(const Vec3& x) const;
    double value(const Vec3& x) const;

    /// Contribution of peak i alone.
    FieldSample eval_peak(std::size_t i, const Vec3& x) const;

    PeakSet scaled(double m) const;
    PeakSet moved(std::vector<Vec3> centers) const;

    std::size_t size() const
    {
        return centers_.size();
    }
    double eps() const
    {
        return eps_;
    }
    double amplitude() const
    {
        return amplitude_;
    }
    const std::vector<Vec3>& centers() const
    {
        return centers_;
    }
    const std::vector<radial::RadialProfile>& profiles() const
    {
        return profiles_;
    }

    /// Decay length eps / sigma_i of peak i in x units.
    double decay_length(std::size_t i) const;

  private:
    double eps_ = 1.0;
    std::vector<Vec3> centers_;
    std::vector<radial::RadialProfile> profiles_;
    double amplitude_ = 1.0;
};

/// (eps, Y, limit profiles) and an optional corrector living on per-peak boxes.
struct AnsatzState
{
    double eps = 0.1;
    std::vector<Vec3> Y;
    std::shared_ptr<const limit::LimitSystemSolution> limit;
    std::optional<std::vector<Field3D>> corrector;

    /// Throws Error(InvalidArgument) for inconsistent sizes or a non-positive eps.
    void validate() const;
};

enum class Backend
{
    spherical,
    box
};

/// W_{eps,Y} = sum_i w^i((x - y^i) / eps) as an analytic field.
PeakSet assemble_ansatz(const AnsatzState& state);

/// W sampled on a lattice; throws Error(BoxTooSmall) when boundary values exceed 1e-10 max|W|.
Field3D assemble_ansatz(const AnsatzState& state, const BoxSpec& box);

/// Samples any analytic field on a lattice with the same boundary check.
Field3D sample_on_box(const PeakSet& peaks, const BoxSpec& box, double boundary_tol = 1e-10);

} // namespace kpeaks::fields
