#include "kpeaks/fields/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kpeaks/core/error.hpp"

namespace kpeaks::fields {

namespace {

/// C-infinity step: 1 for s <= 0, 0 for s >= 1, built from exp(-1/x) bumps.
double
smooth_step(double s, double& derivative)
{
    if (s <= 0.0) {
        derivative = 0.0;
        return 1.0;
    }
    if (s >= 1.0) {
        derivative = 0.0;
        return 0.0;
    }
    double A = std::exp(-1.0 / (1.0 - s));
    double B = std::exp(-1.0 / s);
    double sum = A + B;
    derivative = -A * B * (1.0 / ((1.0 - s) * (1.0 - s)) + 1.0 / (s * s)) / (sum * sum);
    return A / sum;
}

/// Local shape increment f_i(t) - V_i and its t-derivative divided by t (finite at t = 0
/// for smooth shapes).
double
shape(const PotentialModel& m, const WellData& w, double t, double& d_over_t, bool want_grad)
{
    double k = m.curvature;
    switch (w.local_shape) {
        case LocalShape::quadratic: {
            double q = k * t * t;
            if (q >= m.cap) {
                d_over_t = 0.0;
                return m.cap;
            }
            d_over_t = 2.0 * k;
            return q;
        }
        case LocalShape::hoelder_cusp: {
            double th = w.hoelder_theta;
            double q = k * std::pow(t, th);
            if (q >= m.cap) {
                d_over_t = 0.0;
                return m.cap;
            }
            if (want_grad && t == 0.0 && th < 2.0) {
                throw Error(ErrorCode::GradAtCusp, "gradient requested at a cusp center");
            }
            d_over_t = t > 0.0 ? k * th * std::pow(t, th - 2.0) : 0.0;
            return q;
        }
        case LocalShape::flat_cap: {
            double e = std::exp(-k * t * t / m.cap);
            d_over_t = 2.0 * k * e;
            return m.cap * (1.0 - e);
        }
    }
    d_over_t = 0.0;
    return 0.0;
}

double
tilt_value(const PotentialModel& m, const Vec3& x)
{
    double v = 0.0;
    for (int j = 0; j < 3; ++j) {
        if (m.tilt[j] != 0.0) {
            v += m.tilt[j] * m.tilt_length * std::tanh(x[j] / m.tilt_length);
        }
    }
    return v;
}

} // namespace

void
PotentialModel::validate() const
{
    limit::validate_wells(wells);
    require(background > 0.0, "background must be positive");
    require(r0 > 0.0 && cap > 0.0 && curvature >= 0.0 && tilt_length > 0.0, "invalid potential parameters");
    for (std::size_t i = 0; i < wells.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            require(distance(wells[i].center, wells[j].center) >= 2.0 * r0 * (1.0 - 1e-12),
                    "wells closer than 2 r0 would overlap");
        }
    }
    require(analytic_bounds(*this).lower > 0.0, "potential must be bounded below by a positive constant");
}

double
eval_potential(const PotentialModel& m, const Vec3& x)
{
    double v = m.background;
    double rb = m.blend_radius();
    double bw = m.blend_width();
    for (const auto& w : m.wells) {
        double t = distance(x, w.center);
        if (t >= rb + bw) {
            continue;
        }
        double dchi = 0.0;
        double chi = smooth_step((t - rb) / bw, dchi);
        double dot = 0.0;
        double f = w.value + shape(m, w, t, dot, false);
        v += chi * (f - m.background);
    }
    return v + tilt_value(m, x);
}

Vec3
grad_potential(const PotentialModel& m, const Vec3& x)
{
    Vec3 g{0.0, 0.0, 0.0};
    double rb = m.blend_radius();
    double bw = m.blend_width();
    for (const auto& w : m.wells) {
        Vec3 d = x - w.center;
        double t = norm(d);
        if (t >= rb + bw) {
            continue;
        }
        double dchi = 0.0;
        double chi = smooth_step((t - rb) / bw, dchi);
        double d_over_t = 0.0;
        double f = w.value + shape(m, w, t, d_over_t, true);
        // d/dx [chi (f - V_bg)] = (chi' / bw (f - V_bg) / t + chi f'/t) (x - a)
        double radial = chi * d_over_t;
        if (dchi != 0.0) {
            radial += dchi / bw * (f - m.background) / t;
        }
        g = g + radial * d;
    }
    for (int j = 0; j < 3; ++j) {
        if (m.tilt[j] != 0.0) {
            double s = 1.0 / std::cosh(x[j] / m.tilt_length);
            g[j] += m.tilt[j] * s * s;
        }
    }
    return g;
}

PotentialBounds
analytic_bounds(const PotentialModel& m)
{
    // V is a convex combination of V_bg and f_i on each blend shell, plus a bounded tilt.
    double lo = m.background;
    double hi = m.background;
    double r_out = m.blend_radius() + m.blend_width();
    for (const auto& w : m.wells) {
        double dummy = 0.0;
        double top = w.value + shape(m, w, r_out, dummy, false);
        lo = std::min(lo, w.value);
        hi = std::max(hi, top);
    }
    double t = 0.0;
    for (int j = 0; j < 3; ++j) {
        t += std::abs(m.tilt[j]) * m.tilt_length;
    }
    return {lo - t, hi + t};
}

namespace {

double
min_distance(const std::vector<WellData>& wells)
{
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < wells.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            d = std::min(d, distance(wells[i].center, wells[j].center));
        }
    }
    return d;
}

PotentialModel
two_wells(const std::string& name)
{
    PotentialModel m;
    m.name = name;
    m.wells = {WellData{{-1.0, 0.0, 0.0}, 1.0}, WellData{{1.0, 0.0, 0.0}, 1.0}};
    m.r0 = 0.5 * min_distance(m.wells);
    return m;
}

/// Splits "name(arg)" into name and argument.
bool
parse_call(const std::string& text, std::string& name, double& arg)
{
    auto open = text.find('(');
    if (open == std::string::npos) {
        name = text;
        return false;
    }
    auto close = text.find(')', open);
    if (close == std::string::npos || close != text.size() - 1) {
        throw Error(ErrorCode::ConfigError, "malformed preset name '" + text + "'");
    }
    name = text.substr(0, open);
    try {
        std::size_t used = 0;
        std::string inner = text.substr(open + 1, close - open - 1);
        arg = std::stod(inner, &used);
        if (used != inner.size()) {
            throw std::invalid_argument(inner);
        }
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "malformed preset argument in '" + text + "'");
    }
    return true;
}

} // namespace

std::vector<std::string>
preset_names()
{
    return {"two_well_quadratic",  "three_well_quadratic", "two_well_hoelder(0.5)", "two_well_flat_cap",
            "single_well",         "constant",             "two_well_constant",     "tilted_well(0.1)",
            "two_well_tilted(0.1)", "two_well_adversarial"};
}

PotentialModel
make_preset(const std::string& text)
{
    std::string name;
    double arg = 0.0;
    bool has_arg = parse_call(text, name, arg);
    PotentialModel m;
    if (name == "two_well_quadratic" && !has_arg) {
        m = two_wells(text);
    } else if (name == "three_well_quadratic" && !has_arg) {
        m.name = text;
        double rad = 2.0 / std::sqrt(3.0);
        for (int k = 0; k < 3; ++k) {
            double phi = 2.0 * std::numbers::pi * k / 3.0;
            m.wells.push_back(WellData{{rad * std::cos(phi), rad * std::sin(phi), 0.0}, 1.0});
        }
        m.r0 = 0.5 * min_distance(m.wells);
    } else if (name == "two_well_hoelder") {
        double theta = has_arg ? arg : 0.5;
        require(theta > 0.0 && theta <= 1.0, "hoelder exponent must lie in (0, 1]");
        m = two_wells(text);
        for (auto& w : m.wells) {
            w.local_shape = LocalShape::hoelder_cusp;
            w.hoelder_theta = theta;
        }
    } else if (name == "two_well_flat_cap" && !has_arg) {
        m = two_wells(text);
        m.cap = 0.5;
        for (auto& w : m.wells) {
            w.local_shape = LocalShape::flat_cap;
        }
    } else if (name == "single_well" && !has_arg) {
        m.name = text;
        m.wells = {WellData{{0.0, 0.0, 0.0}, 1.0}};
    } else if (name == "constant" && !has_arg) {
        m.name = text;
        m.wells = {WellData{{0.0, 0.0, 0.0}, 1.0}};
        m.background = 1.0;
        m.curvature = 0.0;
    } else if (name == "two_well_constant" && !has_arg) {
        m = two_wells(text);
        m.background = 1.0;
        m.curvature = 0.0;
    } else if (name == "tilted_well") {
        m.name = text;
        m.wells = {WellData{{0.0, 0.0, 0.0}, 1.0}};
        m.tilt = {has_arg ? arg : 0.1, 0.0, 0.0};
    } else if (name == "two_well_tilted") {
        m = two_wells(text);
        m.tilt = {has_arg ? arg : 0.1, 0.0, 0.0};
    } else if (name == "two_well_adversarial" && !has_arg) {
        // Transverse tilt whose slope exceeds 2 kappa |y - a_i| on all of B_delta: no stationary point there.
        // The background matches the quadratic on the blend shell, so no wall confines a peak of finite width.
        m = two_wells(text);
        m.background = 1.0 + m.curvature * 0.55 * 0.55;
        m.tilt = {0.0, 0.6, 0.0};
        m.tilt_length = 1.0;
    } else {
        std::ostringstream msg;
        msg << "unknown potential preset '" << text << "'; valid presets:";
        for (const auto& n : preset_names()) {
            msg << ' ' << n;
        }
        throw Error(ErrorCode::ConfigError, msg.str());
    }
    m.validate();
    return m;
}

Vec3
offset_for_gap(const PotentialModel& m, std::size_t well, const Vec3& direction, double gap)
{
    require(well < m.wells.size(), "well index out of range");
    Vec3 d = (1.0 / norm(direction)) * direction;
    const Vec3& a = m.wells[well].center;
    double v0 = eval_potential(m, a);
    double lo = 0.0;
    double hi = m.blend_radius();
    require(eval_potential(m, a + hi * d) - v0 > gap, "requested potential gap not reached inside the well");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (eval_potential(m, a + mid * d) - v0 < gap ? lo : hi) = mid;
    }
    return a + (0.5 * (lo + hi)) * d;
}

} // namespace kpeaks::fields
