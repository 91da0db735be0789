#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <vector>

#include "kpeaks/core/parallel.hpp"
#include "kpeaks/core/vec3.hpp"
#include "kpeaks/fields/ansatz.hpp"

namespace kpeaks::fields {

/// Orders and truncation of the per-peak spherical product rule.
struct SphericalSettings
{
    /// Gauss-Legendre nodes in cos(theta); harmonics of degree < 2 n_theta are integrated exactly.
    int n_theta = 24;
    /// Uniform nodes in phi; exact for azimuthal frequencies below n_phi.
    int n_phi = 48;
    /// Gauss-Legendre order per radial panel (exact for radial polynomials of degree 2 order - 1).
    int radial_order = 8;
    /// Radial panel width in decay lengths of the peak.
    double panel_width = 0.5;
    /// Absolute cap on the panel width (resolves fixed-width features of V).
    double max_panel = std::numeric_limits<double>::infinity();
    /// Radial truncation where the peak profile drops below cutoff * peak.
    double cutoff = 1e-9;
    /// Steepness of the partition of unity, in inverse decay lengths.
    double partition_sharpness = 3.0;
};

/// Unit direction and solid-angle weight (weights sum to 4 pi).
struct AngularNode
{
    Vec3 direction;
    double weight;
};

std::vector<AngularNode> angular_rule(int n_theta, int n_phi);

/// Radial nodes on [0, R] with panels of width at most \p panel; weights include r^2.
struct RadialNodes
{
    std::vector<double> r;
    std::vector<double> weight;
};

RadialNodes radial_rule(double R, double panel, int order);

/// Integration over R^3 of fields built from the peaks of a PeakSet.
///
/// R^3 is split by the partition chi_i proportional to exp(-beta |x - y^i| / l_i); each chi_i f
/// is integrated on a product grid centered at y^i and truncated where peak i has decayed.
/// Shell sums are combined in a fixed order, so results do not depend on the thread count.
class SphericalQuadrature
{
  public:
    SphericalQuadrature(const PeakSet& peaks, const SphericalSettings& settings = {});

    /// Sum over all nodes of weight * f(x) for f returning std::array<double, N>.
    template <std::size_t N, class F>
    std::array<double, N> integrate(F&& f) const;

    const SphericalSettings& settings() const
    {
        return settings_;
    }
    std::size_t node_count() const;

    /// chi_i(x).
    double partition(std::size_t i, const Vec3& x) const;

  private:
    SphericalSettings settings_;
    std::vector<Vec3> centers_;
    std::vector<double> lengths_;
    std::vector<RadialNodes> radial_;
    std::vector<AngularNode> angular_;
};

/// Integral over the ball B_R(center) with radial panels of width at most \p panel.
template <std::size_t N, class F>
std::array<double, N> integrate_ball(const Vec3& center, double R, double panel, const SphericalSettings& s, F&& f);

/// Integral over the sphere |x - center| = R of f(x, nu) with nu the outward normal.
template <std::size_t N, class F>
std::array<double, N> integrate_sphere(const Vec3& center, double R, const SphericalSettings& s, F&& f);

// ---------------------------------------------------------------------------------------------

namespace detail {

template <std::size_t N>
std::array<double, N>
combine(const std::vector<std::array<double, N>>& parts)
{
    std::array<double, N> out{};
    for (const auto& p : parts) {
        for (std::size_t m = 0; m < N; ++m) {
            out[m] += p[m];
        }
    }
    return out;
}

} // namespace detail

template <std::size_t N, class F>
std::array<double, N>
SphericalQuadrature::integrate(F&& f) const
{
    std::vector<std::pair<std::size_t, std::size_t>> shells;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        for (std::size_t q = 0; q < radial_[i].r.size(); ++q) {
            shells.emplace_back(i, q);
        }
    }
    std::vector<std::array<double, N>> parts(shells.size());
    parallel_blocks(shells.size(), [&](std::size_t s) {
        auto [i, q] = shells[s];
        double r = radial_[i].r[q];
        double wr = radial_[i].weight[q];
        std::array<double, N> acc{};
        for (const auto& node : angular_) {
            Vec3 x = centers_[i] + r * node.direction;
            double w = wr * node.weight * partition(i, x);
            if (w == 0.0) {
                continue;
            }
            std::array<double, N> v = f(x);
            for (std::size_t m = 0; m < N; ++m) {
                acc[m] += w * v[m];
            }
        }
        parts[s] = acc;
    });
    return detail::combine(parts);
}

template <std::size_t N, class F>
std::array<double, N>
integrate_ball(const Vec3& center, double R, double panel, const SphericalSettings& s, F&& f)
{
    RadialNodes rad = radial_rule(R, panel, s.radial_order);
    std::vector<AngularNode> ang = angular_rule(s.n_theta, s.n_phi);
    std::vector<std::array<double, N>> parts(rad.r.size());
    parallel_blocks(rad.r.size(), [&](std::size_t q) {
        std::array<double, N> acc{};
        for (const auto& node : ang) {
            std::array<double, N> v = f(center + rad.r[q] * node.direction);
            for (std::size_t m = 0; m < N; ++m) {
                acc[m] += rad.weight[q] * node.weight * v[m];
            }
        }
        parts[q] = acc;
    });
    return detail::combine(parts);
}

template <std::size_t N, class F>
std::array<double, N>
integrate_sphere(const Vec3& center, double R, const SphericalSettings& s, F&& f)
{
    std::array<double, N> acc{};
    for (const auto& node : angular_rule(s.n_theta, s.n_phi)) {
        std::array<double, N> v = f(center + R * node.direction, node.direction);
        for (std::size_t m = 0; m < N; ++m) {
            acc[m] += R * R * node.weight * v[m];
        }
    }
    return acc;
}

} // namespace kpeaks::fields
