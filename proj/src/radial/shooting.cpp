#include "kpeaks/radial/shooting.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dopri.hpp"
#include "kpeaks/core/error.hpp"
#include "kpeaks/core/fd.hpp"

namespace kpeaks::radial {

namespace {

using detail::State;

enum class Outcome
{
    Undershoot,
    Overshoot,
    Neither
};

struct GroundStateOde
{
    double lambda;
    double p;

    State operator()(double r, const State& y) const
    {
        double nl = y.u >= 0.0 ? std::pow(y.u, p) : -std::pow(-y.u, p);
        return {y.v, -2.0 * y.v / r + lambda * y.u - nl};
    }
};

/// Series start (u, u') at a small radius.
State
series_start(double u0, double r0, const GroundStateOde& ode)
{
    double c2 = (ode.lambda * u0 - std::pow(u0, ode.p)) / 6.0;
    return {u0 + c2 * r0 * r0, 2.0 * c2 * r0};
}

Outcome
shoot(double u0, const GroundStateOde& ode, double r0, double r_end, double rtol)
{
    State y = series_start(u0, r0, ode);
    double r = r0;
    double h = r0;
    Outcome outcome = Outcome::Neither;
    double atol = 1e-6 * rtol * u0;
    detail::dopri45(ode, r, y, r_end, h, rtol, atol, [&](double, const State& s) {
        if (s.u < 0.0) {
            outcome = Outcome::Overshoot;
            return true;
        }
        if (s.v > 0.0) {
            outcome = Outcome::Undershoot;
            return true;
        }
        return false;
    });
    return outcome;
}

} // namespace

RadialProfile
solve_ground_state(double lambda, double p, const ShootingOptions& options)
{
    require(lambda > 0.0, "lambda must be positive");
    require(p > 1.0 && p < 5.0, "exponent must lie in (1, 5)");
    require(options.tol > 0.0, "tolerance must be positive");

    GroundStateOde ode{lambda, p};
    double scale = 1.0 / std::sqrt(lambda);
    RadialGrid grid = RadialGrid::geometric(options.first_spacing * scale, options.ratio, options.r_max * scale);
    std::size_t N = grid.size() - 1;
    double r0 = std::min(1e-6 * scale, 0.1 * grid[1]);
    double rtol = std::max(1e-13, 1e-3 * options.tol);
    double r_shoot = 4.0 * grid.r_max();

    // Bracket: just above the constant solution lambda^(1/(p-1)) is an undershoot.
    double lo = std::pow(lambda, 1.0 / (p - 1.0)) * (1.0 + 1e-3);
    if (shoot(lo, ode, r0, r_shoot, rtol) != Outcome::Undershoot) {
        throw Error(ErrorCode::NoSignChange, "lower shooting bracket is not an undershoot");
    }
    double hi = 2.0 * lo;
    int doublings = 0;
    while (shoot(hi, ode, r0, r_shoot, rtol) == Outcome::Undershoot) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 60) {
            throw Error(ErrorCode::NoSignChange, "no overshoot found while expanding the bracket");
        }
    }

    int iterations = 0;
    while (true) {
        double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            break;
        }
        Outcome o = shoot(mid, ode, r0, r_shoot, rtol);
        if (o == Outcome::Undershoot) {
            lo = mid;
        } else if (o == Outcome::Overshoot) {
            hi = mid;
        } else {
            lo = hi = mid;
            break;
        }
        if (++iterations > options.max_iterations) {
            throw Error(ErrorCode::MaxIterations, "shooting bisection did not converge");
        }
    }
    double u0 = lo;

    std::vector<double> u(N + 1), v(N + 1);
    u[0] = u0;
    v[0] = 0.0;

    // Outward pass up to the matching node.
    double atol_out = 1e-6 * rtol * u0;
    std::size_t s = 0;
    {
        State y = series_start(u0, r0, ode);
        double r = r0;
        double h = r0;
        for (std::size_t i = 1; i <= N; ++i) {
            detail::dopri45(ode, r, y, grid[i], h, rtol, atol_out, [](double, const State&) { return false; });
            u[i] = y.u;
            v[i] = y.v;
            if (y.u < options.match_fraction * u0) {
                s = i;
                break;
            }
        }
    }
    if (s == 0) {
        throw Error(ErrorCode::NoConvergence, "outward trajectory never reached the matching level");
    }

    // Inward pass from the decaying tail; the amplitude is tuned so u matches at node s.
    double sigma = std::sqrt(lambda);
    std::vector<double> ui(N + 1), vi(N + 1);
    auto inward = [&](double amplitude) {
        TailModel t{amplitude, sigma, 0.0};
        State y{t.value(grid[N]), t.deriv(grid[N])};
        ui[N] = y.u;
        vi[N] = y.v;
        double r = grid[N];
        double h = -(grid[N] - grid[N - 1]);
        for (std::size_t i = N; i-- > s;) {
            detail::dopri45(ode, r, y, grid[i], h, rtol, 1e-300, [](double, const State&) { return false; });
            ui[i] = y.u;
            vi[i] = y.v;
        }
        return ui[s] - u[s];
    };
    double c0 = u[s] * grid[s] * std::exp(sigma * grid[s]);
    double c1 = 1.01 * c0;
    double f0 = inward(c0);
    double f1 = inward(c1);
    for (int it = 0; it < 50 && std::abs(f1) > 1e-15 * u[s] && f1 != f0; ++it) {
        double c2 = c1 - f1 * (c1 - c0) / (f1 - f0);
        c0 = c1;
        f0 = f1;
        c1 = c2;
        f1 = inward(c1);
    }
    double slope_mismatch = std::abs(vi[s] - v[s]);
    for (std::size_t i = s; i <= N; ++i) {
        u[i] = ui[i];
        v[i] = vi[i];
    }

    for (std::size_t i = 1; i <= N; ++i) {
        if (!(u[i] > 0.0) || !(u[i] < u[i - 1])) {
            std::ostringstream msg;
            msg << "profile is not positive and decreasing at r = " << grid[i];
            throw Error(ErrorCode::NoConvergence, msg.str());
        }
    }

    std::vector<double> d2(N + 1);
    d2[0] = (lambda * u0 - std::pow(u0, p)) / 3.0;
    for (std::size_t i = 1; i <= N; ++i) {
        d2[i] = ode(grid[i], State{u[i], v[i]}).v;
    }

    // Tail fit at the first node below the tail fraction.
    std::size_t m = N;
    for (std::size_t i = 1; i <= N; ++i) {
        if (u[i] < options.tail_fraction * u0) {
            m = i;
            break;
        }
    }
    TailModel tail;
    tail.r_match = grid[m];
    tail.rate = -v[m] / u[m] - 1.0 / grid[m];
    tail.amplitude = u[m] * grid[m] * std::exp(tail.rate * grid[m]);

    ProfileEquation eq{lambda, p, 1.0, true};
    RadialProfile profile(grid, std::move(u), std::move(v), std::move(d2), tail, eq);
    profile.match_radius = grid[s];
    profile.match_slope_mismatch = slope_mismatch;
    profile.residual_sup = ode_residual_sup(profile);
    // The equation is homogeneous of size lambda^(p/(p-1)); the gate is taken in that unit.
    double gate = options.tol * std::max(1.0, std::pow(lambda, p / (p - 1.0)));
    if (options.enforce_residual && profile.residual_sup > gate) {
        std::ostringstream msg;
        msg << "ground-state residual " << profile.residual_sup << " exceeds " << gate;
        throw Error(ErrorCode::ResidualTooLarge, msg.str());
    }
    return profile;
}

std::vector<double>
ode_residual(const RadialProfile& profile)
{
    const auto& grid = profile.grid();
    const auto& u = profile.values();
    const auto& eq = profile.equation();
    std::size_t n = grid.size();
    std::vector<double> res(n, 0.0);
    constexpr std::size_t width = 9;
    if (n < width) {
        return res;
    }
    // Centred stencils; near r = 0 the even extension u(-r) = u(r) supplies the missing nodes.
    std::vector<double> nodes(width), vals(width);
    long half = static_cast<long>(width / 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        long j0 = std::min(static_cast<long>(i) - half, static_cast<long>(n - width));
        for (std::size_t k = 0; k < width; ++k) {
            long j = j0 + static_cast<long>(k);
            std::size_t a = static_cast<std::size_t>(std::abs(j));
            nodes[k] = j < 0 ? -grid[a] : grid[a];
            vals[k] = u[a];
        }
        auto w1 = fd_weights(grid[i], nodes, 1);
        auto w2 = fd_weights(grid[i], nodes, 2);
        double du = 0.0;
        double d2u = 0.0;
        for (std::size_t k = 0; k < width; ++k) {
            du += w1[k] * vals[k];
            d2u += w2[k] * vals[k];
        }
        double r = grid[i];
        double nl = u[i] >= 0.0 ? std::pow(u[i], eq.exponent) : -std::pow(-u[i], eq.exponent);
        res[i] = std::abs(-eq.diffusion * (d2u + 2.0 * du / r) + eq.lambda * u[i] - nl);
    }
    return res;
}

double
ode_residual_sup(const RadialProfile& profile)
{
    double m = 0.0;
    for (double r : ode_residual(profile)) {
        m = std::max(m, r);
    }
    return m;
}

} // namespace kpeaks::radial
