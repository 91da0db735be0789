#pragma once

#include <vector>

#include "kpeaks/radial/grid.hpp"

namespace kpeaks::radial {

/// Exponential tail u(r) ~ amplitude * exp(-rate r) / r, used beyond the last grid node.
struct TailModel
{
    double amplitude = 0.0;
    double rate = 1.0;
    double r_match = 0.0;

    double value(double r) const;
    double deriv(double r) const;
    double second(double r) const;
};

/// Equation -diffusion * Delta u + lambda u = u^exponent that a profile solves (when exact).
struct ProfileEquation
{
    double lambda = 1.0;
    double exponent = 3.0;
    double diffusion = 1.0;
    /// True when the samples solve the equation; the Laplacian is then taken from it.
    bool exact = false;
};

/// Value, first derivative and three-dimensional Laplacian of a radial profile at one radius.
struct RadialSample
{
    double value;
    double deriv;
    double laplacian;
};

/// Radial profile sampled on a grid, interpolated by quintic Hermite splines built from
/// (u, u', u'') at the nodes, extended by an exponential tail beyond the last node.
class RadialProfile
{
  public:
    RadialProfile() = default;

    RadialProfile(RadialGrid grid,
                  std::vector<double> values,
                  std::vector<double> derivs,
                  std::vector<double> seconds,
                  TailModel tail,
                  ProfileEquation equation);

    double value(double r) const;
    double deriv(double r) const;
    double second(double r) const;
    double laplacian(double r) const;
    RadialSample sample(double r) const;

    /// v(r) = u(r / s); the equation diffusion becomes diffusion * s^2.
    RadialProfile rescaled(double s) const;

    /// m * u; the result no longer solves the equation unless m == 1.
    RadialProfile scaled_amplitude(double m) const;

    const RadialGrid& grid() const
    {
        return grid_;
    }
    const std::vector<double>& values() const
    {
        return values_;
    }
    const std::vector<double>& derivs() const
    {
        return derivs_;
    }
    const std::vector<double>& seconds() const
    {
        return seconds_;
    }
    const TailModel& tail() const
    {
        return tail_;
    }
    const ProfileEquation& equation() const
    {
        return equation_;
    }
    double peak() const
    {
        return values_.front();
    }
    double r_max() const
    {
        return grid_.r_max();
    }

    /// Radius where value() falls below \p fraction of the peak (tail included).
    double radius_below(double fraction) const;

    /// Shooting diagnostics (zero when not produced by the shooting solver).
    double residual_sup = 0.0;
    double match_radius = 0.0;
    double match_slope_mismatch = 0.0;

  private:
    void hermite(std::size_t i, double r, double& u, double& du, double& d2u) const;

    RadialGrid grid_;
    std::vector<double> values_;
    std::vector<double> derivs_;
    std::vector<double> seconds_;
    TailModel tail_;
    ProfileEquation equation_;
};

} // namespace kpeaks::radial
