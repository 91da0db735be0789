#include <doctest.h>

#include <cmath>
#include <memory>

#include "kpeaks/core/error.hpp"
#include "kpeaks/energy/energy.hpp"
#include "kpeaks/reduction/reduction.hpp"

using namespace kpeaks;
using namespace kpeaks::reduction;

namespace {

const limit::ProblemParams params{1.0, 0.005, 3.0};

std::shared_ptr<const limit::LimitSystemSolution>
limit_for(const fields::PotentialModel& m)
{
    return std::make_shared<const limit::LimitSystemSolution>(limit::build_limit_system(params, m.wells));
}

std::vector<Vec3>
centers(const fields::PotentialModel& m)
{
    std::vector<Vec3> A;
    for (const auto& w : m.wells) {
        A.push_back(w.center);
    }
    return A;
}

fields::AnsatzState
state_at(std::shared_ptr<const limit::LimitSystemSolution> lim, double eps, std::vector<Vec3> Y)
{
    fields::AnsatzState s;
    s.eps = eps;
    s.limit = std::move(lim);
    s.Y = std::move(Y);
    return s;
}

} // namespace

TEST_CASE("constant potential: the ansatz already solves the equation")
{
    auto model = fields::make_preset("constant");
    auto sol = solve_phi(state_at(limit_for(model), 0.1, centers(model)), model, ReductionSettings{});
    CHECK(sol.norm_eps <= 1e-6 * std::pow(0.1, 1.5));
    CHECK(sol.projected_residual <= 1e-8);
}

TEST_CASE("corrector: constraints, residuals and the two-point eps scan")
{
    auto model = fields::make_preset("two_well_quadratic");
    auto lim = limit_for(model);
    ReductionSettings rs;
    std::vector<double> scaled;
    for (double eps : {0.1, 0.05}) {
        auto sol = solve_phi(state_at(lim, eps, centers(model)), model, rs);
        CHECK(sol.projected_residual <= rs.newton_tol);
        for (double r : sol.projection_residuals) {
            CHECK(std::abs(r) <= 1e-10 * sol.norm_eps);
        }
        scaled.push_back(sol.norm_eps / std::pow(eps, 1.5));
        // theta = 1 for quadratic wells, tau = 0.1.
        CHECK(scaled.back() <= std::pow(eps, 1.0 - rs.tau));
    }
    CHECK(scaled[1] < scaled[0]);
}

TEST_CASE("remainder of the second-order expansion scales like its predicted shape")
{
    auto model = fields::make_preset("two_well_quadratic");
    auto lim = limit_for(model);
    ReductionSettings rs;
    std::vector<double> ratios;
    for (double eps : {0.1, 0.05}) {
        BoxProblem problem(state_at(lim, eps, centers(model)), model, rs.grid);
        auto sol = solve_phi(problem, rs);
        auto sample = remainder_sample(problem, sol.phi);
        CHECK(sample.shape > 0.0);
        ratios.push_back(sample.ratio);
    }
    // The constant does not depend on eps.
    CHECK(std::abs(ratios[0] - ratios[1]) <= 0.25 * ratios[1]);
}

TEST_CASE("reduced energy: leading constant, landscape ordering and relabeling")
{
    auto model = fields::make_preset("two_well_quadratic");
    auto lim = limit_for(model);
    ReductionSettings rs;
    double eps = 0.1;
    auto A = centers(model);
    ReducedEnergy j(model, lim, eps, rs);
    auto at_A = j.solve(A);
    auto consts = energy::expansion_constants(*lim, params);
    double ansatz = energy::energy_functional(fields::assemble_ansatz(state_at(lim, eps, A)), eps, model, params);
    double eps3 = std::pow(eps, 3);
    CHECK(std::abs(at_A.energy - consts.C1 * eps3) <= std::abs(ansatz - consts.C1 * eps3) + 2.0 * at_A.norm_eps * at_A.norm_eps);

    // Peaks moved to larger potential values raise j.
    for (Vec3 d : {Vec3{0.1, 0.0, 0.0}, Vec3{0.0, -0.15, 0.05}}) {
        std::vector<Vec3> Y{A[0] + d, A[1] - d};
        CHECK(j(Y) > at_A.energy);
    }

    // Identical wells: swapping the peak labels leaves j unchanged.
    auto swapped_model = model;
    std::swap(swapped_model.wells[0], swapped_model.wells[1]);
    std::vector<Vec3> Y{A[0] + Vec3{0.02, 0.01, 0.0}, A[1] + Vec3{-0.03, 0.0, 0.01}};
    double j1 = reduced_energy(Y, eps, model, lim, rs);
    double j2 = reduced_energy({Y[1], Y[0]}, eps, swapped_model, limit_for(swapped_model), rs);
    CHECK(std::abs(j1 - j2) <= 1e-12 * std::abs(j1));
}

TEST_CASE("multi-peak clauses hold for the ansatz and the corrected field")
{
    auto model = fields::make_preset("two_well_quadratic");
    auto lim = limit_for(model);
    ReductionSettings rs;
    MultipeakSettings ms;
    ms.C_energy = default_energy_bound(*lim, params);
    auto A = centers(model);
    std::vector<double> ratio;
    for (double eps : {0.2, 0.1}) {
        BoxProblem problem(state_at(lim, eps, A), model, rs.grid);
        auto bare = multipeak_diagnostics(problem, {}, A, ms);
        CHECK(bare.passed);
        CHECK(bare.maxima.size() == 2);
        auto sol = solve_phi(problem, rs);
        auto full = multipeak_diagnostics(problem, sol.phi, A, ms);
        CHECK(full.clause_i);
        CHECK(full.clause_ii);
        CHECK(full.clause_iii);
        ratio.push_back(full.energy_ratio);
    }
    CHECK(std::abs(ratio[1] - ratio[0]) <= 0.1 * ratio[1]);
}

TEST_CASE("critical point check: extrapolation, trivial constant case, cusp rejection")
{
    auto make = [](double eps, Vec3 y) {
        ReducedLandscape l;
        l.eps = eps;
        l.argmin = {y};
        return l;
    };
    auto quad = fields::make_preset("single_well");
    // Peaks approaching the well linearly in eps extrapolate to it exactly.
    Vec3 drift{0.3, -0.1, 0.2};
    auto rep = critical_point_check({make(0.2, 0.2 * drift), make(0.1, 0.1 * drift), make(0.05, 0.05 * drift)}, quad);
    CHECK(rep.passed);
    CHECK(norm(rep.limits[0]) <= 1e-14);

    auto flat = fields::make_preset("constant");
    auto trivial = critical_point_check({make(0.1, Vec3{0.2, 0.0, 0.0}), make(0.05, Vec3{-0.1, 0.3, 0.0})}, flat);
    CHECK(trivial.passed);
    CHECK(trivial.grad_norms[0] == 0.0);

    auto cusp = fields::make_preset("two_well_hoelder(0.5)");
    try {
        critical_point_check({make(0.1, Vec3{}), make(0.05, Vec3{})}, cusp);
        FAIL("expected GradAtCusp");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GradAtCusp);
    }
    CHECK_THROWS_AS(critical_point_check({make(0.1, Vec3{})}, quad), Error);
}

TEST_CASE("peaks track the critical point of a tilted potential")
{
    auto model = fields::make_preset("tilted_well(0.1)");
    auto lim = limit_for(model);
    ReductionSettings rs;
    rs.perturbed_starts = 0;
    double eps = 0.1;
    ReducedEnergy j(model, lim, eps, rs);
    auto domain = fields::PeakDomain::preset(centers(model));
    auto land = minimize_j(j, domain, rs);
    CHECK(land.interior);
    // The tilt moves the minimum of V from a to x*, where grad V(x*) = 0 along the tilt.
    Vec3 a = model.wells[0].center;
    double lo = -domain.delta;
    double hi = 0.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (fields::grad_potential(model, a + Vec3{mid, 0.0, 0.0})[0] > 0.0 ? hi : lo) = mid;
    }
    Vec3 shifted = a + Vec3{0.5 * (lo + hi), 0.0, 0.0};
    CHECK(distance(land.argmin[0], shifted) < 0.25 * distance(shifted, a));
    CHECK(land.phi.unprojected_residual <= 10.0 * rs.newton_tol);
}
