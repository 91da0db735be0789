#include "kpeaks/radial/profile.hpp"

#include <cmath>

#include "kpeaks/core/error.hpp"

namespace kpeaks::radial {

namespace {

double
signed_power(double u, double p)
{
    return u >= 0.0 ? std::pow(u, p) : -std::pow(-u, p);
}

} // namespace

double
TailModel::value(double r) const
{
    return amplitude * std::exp(-rate * r) / r;
}

double
TailModel::deriv(double r) const
{
    return -value(r) * (rate + 1.0 / r);
}

double
TailModel::second(double r) const
{
    double s = rate + 1.0 / r;
    return value(r) * (s * s + 1.0 / (r * r));
}

RadialProfile::RadialProfile(RadialGrid grid,
                             std::vector<double> values,
                             std::vector<double> derivs,
                             std::vector<double> seconds,
                             TailModel tail,
                             ProfileEquation equation)
    : grid_(std::move(grid))
    , values_(std::move(values))
    , derivs_(std::move(derivs))
    , seconds_(std::move(seconds))
    , tail_(tail)
    , equation_(equation)
{
    require(values_.size() == grid_.size() && derivs_.size() == grid_.size() && seconds_.size() == grid_.size(),
            "profile arrays must match the grid");
    require(derivs_.front() == 0.0, "radial profile must have u'(0) = 0");
}

void
RadialProfile::hermite(std::size_t i, double r, double& u, double& du, double& d2u) const
{
    double a = grid_[i];
    double h = grid_[i + 1] - a;
    double t = (r - a) / h;
    double t2 = t * t;
    double t3 = t2 * t;
    double t4 = t3 * t;
    double t5 = t4 * t;

    double f0 = values_[i], d0 = derivs_[i] * h, s0 = seconds_[i] * h * h;
    double f1 = values_[i + 1], d1 = derivs_[i + 1] * h, s1 = seconds_[i + 1] * h * h;

    double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    double h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    double h5 = 0.5 * t3 - t4 + 0.5 * t5;
    u = f0 * h0 + d0 * h1 + s0 * h2 + f1 * h3 + d1 * h4 + s1 * h5;

    double g0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    double g1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    double g2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
    double g4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    double g5 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
    du = (f0 * g0 + d0 * g1 + s0 * g2 - f1 * g0 + d1 * g4 + s1 * g5) / h;

    double k0 = -60.0 * t + 180.0 * t2 - 120.0 * t3;
    double k1 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
    double k2 = 1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3;
    double k4 = -24.0 * t + 84.0 * t2 - 60.0 * t3;
    double k5 = 3.0 * t - 12.0 * t2 + 10.0 * t3;
    d2u = (f0 * k0 + d0 * k1 + s0 * k2 - f1 * k0 + d1 * k4 + s1 * k5) / (h * h);
}

RadialSample
RadialProfile::sample(double r) const
{
    r = std::abs(r);
    RadialSample s{};
    double d2u = 0.0;
    if (r > grid_.r_max()) {
        s.value = tail_.value(r);
        s.deriv = tail_.deriv(r);
        d2u = tail_.second(r);
    } else {
        hermite(grid_.locate(r), r, s.value, s.deriv, d2u);
    }
    if (equation_.exact) {
        s.laplacian = (equation_.lambda * s.value - signed_power(s.value, equation_.exponent)) / equation_.diffusion;
    } else if (r > 0.0) {
        s.laplacian = d2u + 2.0 * s.deriv / r;
    } else {
        s.laplacian = 3.0 * d2u;
    }
    return s;
}

double
RadialProfile::value(double r) const
{
    r = std::abs(r);
    if (r > grid_.r_max()) {
        return tail_.value(r);
    }
    double u, du, d2u;
    hermite(grid_.locate(r), r, u, du, d2u);
    return u;
}

double
RadialProfile::deriv(double r) const
{
    r = std::abs(r);
    if (r > grid_.r_max()) {
        return tail_.deriv(r);
    }
    double u, du, d2u;
    hermite(grid_.locate(r), r, u, du, d2u);
    return du;
}

double
RadialProfile::second(double r) const
{
    r = std::abs(r);
    if (r > grid_.r_max()) {
        return tail_.second(r);
    }
    double u, du, d2u;
    hermite(grid_.locate(r), r, u, du, d2u);
    return d2u;
}

double
RadialProfile::laplacian(double r) const
{
    return sample(r).laplacian;
}

RadialProfile
RadialProfile::rescaled(double s) const
{
    require(s > 0.0, "profile scale must be positive");
    std::vector<double> du(derivs_), d2u(seconds_);
    for (auto& d : du) {
        d /= s;
    }
    for (auto& d : d2u) {
        d /= s * s;
    }
    TailModel tail{tail_.amplitude * s, tail_.rate / s, tail_.r_match * s};
    ProfileEquation eq = equation_;
    eq.diffusion *= s * s;
    RadialProfile out(grid_.scaled(s), values_, std::move(du), std::move(d2u), tail, eq);
    out.residual_sup = residual_sup;
    out.match_radius = match_radius * s;
    out.match_slope_mismatch = match_slope_mismatch / s;
    return out;
}

RadialProfile
RadialProfile::scaled_amplitude(double m) const
{
    std::vector<double> u(values_), du(derivs_), d2u(seconds_);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] *= m;
        du[i] *= m;
        d2u[i] *= m;
    }
    TailModel tail = tail_;
    tail.amplitude *= m;
    ProfileEquation eq = equation_;
    eq.exact = eq.exact && m == 1.0;
    return RadialProfile(grid_, std::move(u), std::move(du), std::move(d2u), tail, eq);
}

double
RadialProfile::radius_below(double fraction) const
{
    double target = fraction * peak();
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (values_[i] < target) {
            double lo = grid_[i - 1];
            double hi = grid_[i];
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                (value(mid) < target ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    require(tail_.amplitude > 0.0, "profile never falls below the requested fraction");
    double r = grid_.r_max();
    for (int it = 0; it < 100; ++it) {
        double f = std::log(tail_.value(r)) - std::log(target);
        double df = -(tail_.rate + 1.0 / r);
        double step = f / df;
        r -= step;
        if (std::abs(step) < 1e-14 * r) {
            break;
        }
    }
    return r;
}

} // namespace kpeaks::radial
