#include "kpeaks/limit/kirchhoff_limit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/format.hpp"
#include "kpeaks/core/parallel.hpp"
#include "kpeaks/radial/quadrature.hpp"

namespace kpeaks::limit {

void
ProblemParams::validate() const
{
    require(a > 0.0, "a must be positive");
    require(b >= 0.0, "b must be nonnegative");
    require(p > 1.0 && p < 5.0, "p must lie in (1, 5)");
}

void
validate_wells(const std::vector<WellData>& wells)
{
    require(!wells.empty(), "at least one well is required");
    for (std::size_t i = 0; i < wells.size(); ++i) {
        require(wells[i].value > 0.0, "well values must be positive");
        require(wells[i].hoelder_theta > 0.0 && wells[i].hoelder_theta <= 2.0, "hoelder exponent out of range");
        for (std::size_t j = 0; j < i; ++j) {
            require(distance(wells[i].center, wells[j].center) > 0.0, "well centers must be distinct");
        }
    }
}

double
solve_scaling(double a, double b_bar)
{
    require(a > 0.0 && b_bar >= 0.0, "solve_scaling needs a > 0 and b_bar >= 0");
    double s = 0.5 * (b_bar + std::sqrt(b_bar * b_bar + 4.0 * a));
    return s * s;
}

namespace {

/// Ground states for each well, solved once per distinct depth.
std::vector<radial::RadialProfile>
ground_states(const std::vector<WellData>& wells, double p, const radial::ShootingOptions& shooting)
{
    std::vector<double> depths;
    for (const auto& w : wells) {
        depths.push_back(w.value);
    }
    std::sort(depths.begin(), depths.end());
    depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
    std::vector<radial::RadialProfile> solved(depths.size());
    std::vector<std::string> failures(depths.size());
    parallel_blocks(depths.size(), [&](std::size_t i) {
        try {
            solved[i] = radial::solve_ground_state(depths[i], p, shooting);
        } catch (const Error& e) {
            failures[i] = e.what();
        }
    });
    std::vector<radial::RadialProfile> out;
    for (std::size_t i = 0; i < wells.size(); ++i) {
        std::size_t k = static_cast<std::size_t>(
            std::lower_bound(depths.begin(), depths.end(), wells[i].value) - depths.begin());
        if (!failures[k].empty()) {
            std::ostringstream msg;
            msg << "well " << i << ": " << failures[k];
            throw Error(ErrorCode::NoConvergence, msg.str());
        }
        out.push_back(solved[k]);
    }
    return out;
}

/// Order-independent sum, so permuting wells leaves the result bit-identical.
double
sorted_sum(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s;
}

} // namespace

LimitSystemSolution
build_limit_system(const ProblemParams& params,
                   const std::vector<WellData>& wells,
                   double tol,
                   const radial::ShootingOptions& shooting)
{
    params.validate();
    validate_wells(wells);
    LimitSystemSolution sol;
    sol.params = params;
    sol.wells = wells;
    sol.q_profiles = ground_states(wells, params.p, shooting);
    for (const auto& q : sol.q_profiles) {
        sol.q_grad_sq.push_back(radial::grad_norm_sq(q));
    }
    sol.b_bar = params.b * sorted_sum(sol.q_grad_sq);
    sol.c = solve_scaling(params.a, sol.b_bar);
    double s = std::sqrt(sol.c);
    for (const auto& q : sol.q_profiles) {
        sol.w_profiles.push_back(q.rescaled(s));
        sol.w_grad_sq.push_back(radial::grad_norm_sq(sol.w_profiles.back()));
    }
    sol.consistency = std::abs(sol.c - params.a - params.b * sorted_sum(sol.w_grad_sq)) / sol.c;
    if (sol.consistency > tol) {
        std::ostringstream msg;
        msg << "limit system self-consistency defect " << sol.consistency << " exceeds " << tol;
        throw Error(ErrorCode::InvariantViolation, msg.str());
    }
    return sol;
}

double
verification_residual(const radial::RadialProfile& w, double c, double lambda, double p)
{
    // Eighth-order central differences on a uniform grid of spacing 0.01 sqrt(c / lambda).
    static constexpr double d1[5] = {0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    static constexpr double d2[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
    double h = 0.01 * std::sqrt(c / lambda);
    double r_end = w.radius_below(1e-12);
    std::size_t n = static_cast<std::size_t>(std::ceil(r_end / h));
    std::vector<double> u(n + 5);
    for (std::size_t j = 0; j < u.size(); ++j) {
        u[j] = w.value(j * h);
    }
    double worst = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        auto at = [&](long j) { return u[static_cast<std::size_t>(std::abs(j))]; };
        long ii = static_cast<long>(i);
        double du = 0.0;
        double d2u = d2[0] * u[i];
        for (long m = 1; m <= 4; ++m) {
            du += d1[m] * (at(ii + m) - at(ii - m));
            d2u += d2[m] * (at(ii + m) + at(ii - m));
        }
        du /= h;
        d2u /= h * h;
        double r = i * h;
        double res = -c * (d2u + 2.0 * du / r) + lambda * u[i] - std::pow(u[i], p);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

std::vector<double>
system_residual(const LimitSystemSolution& sol)
{
    std::vector<double> out(sol.size());
    parallel_blocks(sol.size(), [&](std::size_t i) {
        out[i] = verification_residual(sol.w_profiles[i], sol.c, sol.wells[i].value, sol.params.p);
    });
    return out;
}

SingleWellProfile
solve_single_kirchhoff(const ProblemParams& params, const WellData& well, const radial::ShootingOptions& shooting)
{
    params.validate();
    radial::RadialProfile q = radial::solve_ground_state(well.value, params.p, shooting);
    double g = radial::grad_norm_sq(q);
    SingleWellProfile out;
    out.c = solve_scaling(params.a, params.b * g);
    out.profile = q.rescaled(std::sqrt(out.c));
    out.grad_sq = radial::grad_norm_sq(out.profile);
    return out;
}

SingleKirchhoffSolution
solve_single_kirchhoff_all(const ProblemParams& params,
                           const std::vector<WellData>& wells,
                           const radial::ShootingOptions& shooting)
{
    params.validate();
    validate_wells(wells);
    SingleKirchhoffSolution sol;
    auto qs = ground_states(wells, params.p, shooting);
    for (const auto& q : qs) {
        double g = radial::grad_norm_sq(q);
        SingleWellProfile w;
        w.c = solve_scaling(params.a, params.b * g);
        w.profile = q.rescaled(std::sqrt(w.c));
        w.grad_sq = radial::grad_norm_sq(w.profile);
        sol.wells.push_back(std::move(w));
    }
    for (std::size_t i = 0; i < wells.size(); ++i) {
        std::vector<double> others;
        for (std::size_t j = 0; j < wells.size(); ++j) {
            if (j != i) {
                others.push_back(sol.wells[j].grad_sq);
            }
        }
        sol.K.push_back(sorted_sum(others));
    }
    return sol;
}

void
write_limit_summary(const LimitSystemSolution& sol, const std::filesystem::path& path)
{
    nlohmann::json j;
    j["a"] = sol.params.a;
    j["b"] = sol.params.b;
    j["p"] = sol.params.p;
    j["b_bar"] = sol.b_bar;
    j["c"] = sol.c;
    j["consistency"] = sol.consistency;
    auto residual = system_residual(sol);
    j["wells"] = nlohmann::json::array();
    j["per_well"] = nlohmann::json::array();
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const auto& w = sol.wells[i];
        j["wells"].push_back({{"center", w.center}, {"value", w.value}});
        j["per_well"].push_back({{"lambda", w.value},
                                 {"u0", sol.q_profiles[i].peak()},
                                 {"grad_norm_sq", sol.w_grad_sq[i]},
                                 {"grad_norm_sq_q", sol.q_grad_sq[i]},
                                 {"residual", residual[i]}});
    }
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

} // namespace kpeaks::limit
