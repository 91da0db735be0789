#include "kpeaks/radial/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "kpeaks/core/gauss.hpp"

namespace kpeaks::radial {

double
radial_integral(const RadialProfile& profile, const RadialIntegrand& f)
{
    static const QuadratureRule base = gauss_legendre(8);
    const auto& grid = profile.grid();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double a = grid[i];
        double half = 0.5 * (grid[i + 1] - a);
        double mid = a + half;
        double panel = 0.0;
        for (std::size_t k = 0; k < base.size(); ++k) {
            double r = mid + half * base.nodes[k];
            panel += base.weights[k] * f(r, profile.sample(r)) * r * r;
        }
        total += half * panel;
    }
    const TailModel& tail = profile.tail();
    if (tail.amplitude != 0.0) {
        double width = 1.0 / tail.rate;
        double a = grid.r_max();
        for (int k = 0; k < 60; ++k, a += width) {
            double half = 0.5 * width;
            double mid = a + half;
            double panel = 0.0;
            for (std::size_t j = 0; j < base.size(); ++j) {
                double r = mid + half * base.nodes[j];
                panel += base.weights[j] * f(r, profile.sample(r)) * r * r;
            }
            total += half * panel;
        }
    }
    return 4.0 * std::numbers::pi * total;
}

double
grad_norm_sq(const RadialProfile& profile)
{
    return radial_integral(profile, [](double, const RadialSample& s) { return s.deriv * s.deriv; });
}

double
lp_norm_pow(const RadialProfile& profile, double q)
{
    if (q == 2.0) {
        return radial_integral(profile, [](double, const RadialSample& s) { return s.value * s.value; });
    }
    return radial_integral(profile, [q](double, const RadialSample& s) { return std::pow(std::abs(s.value), q); });
}

} // namespace kpeaks::radial
