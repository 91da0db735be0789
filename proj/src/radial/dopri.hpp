#pragma once

#include <algorithm>
#include <cmath>

namespace kpeaks::radial::detail {

/// State (u, u') of a radial second-order ODE.
struct State
{
    double u;
    double v;
};

/// Adaptive Dormand-Prince 5(4) integration of y' = f(r, y) from r to r_end (either direction).
///
/// Steps carry over between calls through \p h. After every accepted step stop(r, y) is
/// queried; when it returns true the integration ends early and the function returns true.
template <class Rhs, class Stop>
bool
dopri45(const Rhs& f, double& r, State& y, double r_end, double& h, double rtol, double atol, const Stop& stop,
        long max_steps = 10000000)
{
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                     a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                     b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                     e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    double dir = r_end >= r ? 1.0 : -1.0;
    h = dir * std::abs(h);
    for (long step = 0; step < max_steps; ++step) {
        double remaining = r_end - r;
        if (dir * remaining <= 0.0) {
            return false;
        }
        bool last = dir * (h - remaining) >= 0.0;
        double hs = last ? remaining : h;

        State k1 = f(r, y);
        State y2{y.u + hs * a21 * k1.u, y.v + hs * a21 * k1.v};
        State k2 = f(r + hs / 5.0, y2);
        State y3{y.u + hs * (a31 * k1.u + a32 * k2.u), y.v + hs * (a31 * k1.v + a32 * k2.v)};
        State k3 = f(r + 0.3 * hs, y3);
        State y4{y.u + hs * (a41 * k1.u + a42 * k2.u + a43 * k3.u), y.v + hs * (a41 * k1.v + a42 * k2.v + a43 * k3.v)};
        State k4 = f(r + 0.8 * hs, y4);
        State y5{y.u + hs * (a51 * k1.u + a52 * k2.u + a53 * k3.u + a54 * k4.u),
                 y.v + hs * (a51 * k1.v + a52 * k2.v + a53 * k3.v + a54 * k4.v)};
        State k5 = f(r + 8.0 / 9.0 * hs, y5);
        State y6{y.u + hs * (a61 * k1.u + a62 * k2.u + a63 * k3.u + a64 * k4.u + a65 * k5.u),
                 y.v + hs * (a61 * k1.v + a62 * k2.v + a63 * k3.v + a64 * k4.v + a65 * k5.v)};
        State k6 = f(r + hs, y6);
        State yn{y.u + hs * (b1 * k1.u + b3 * k3.u + b4 * k4.u + b5 * k5.u + b6 * k6.u),
                 y.v + hs * (b1 * k1.v + b3 * k3.v + b4 * k4.v + b5 * k5.v + b6 * k6.v)};
        State k7 = f(r + hs, yn);
        double eu = hs * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u + e6 * k6.u + e7 * k7.u);
        double ev = hs * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v + e7 * k7.v);
        double su = atol + rtol * std::max(std::abs(y.u), std::abs(yn.u));
        double sv = atol + rtol * std::max(std::abs(y.v), std::abs(yn.v));
        double err = std::max(std::abs(eu) / su, std::abs(ev) / sv);

        double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            r = last ? r_end : r + hs;
            y = yn;
            if (!last) {
                h = hs * factor;
            }
            if (stop(r, y)) {
                return true;
            }
        } else {
            h = hs * std::max(factor, 0.1);
        }
    }
    return false;
}

} // namespace kpeaks::radial::detail
