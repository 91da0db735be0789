#include <doctest.h>

#include <cmath>

#include "golden_values.hpp"
#include "kpeaks/core/error.hpp"
#include "kpeaks/limit/kirchhoff_limit.hpp"
#include "kpeaks/radial/quadrature.hpp"

using namespace kpeaks;
using namespace kpeaks::limit;

namespace {

double
fixed_point_c(double a, double b_bar)
{
    double c = a;
    for (int i = 0; i < 100000; ++i) {
        double next = a + b_bar * std::sqrt(c);
        if (std::abs(next - c) <= 1e-15 * next) {
            return next;
        }
        c = next;
    }
    return c;
}

std::vector<WellData>
wells2(double v1, double v2)
{
    return {WellData{{-1.0, 0.0, 0.0}, v1}, WellData{{1.0, 0.0, 0.0}, v2}};
}

} // namespace

TEST_CASE("scaling root: closed form, degeneration and fixed-point agreement")
{
    CHECK(solve_scaling(4.0, 3.0) == doctest::Approx(16.0).epsilon(1e-15));
    CHECK(solve_scaling(2.5, 0.0) == doctest::Approx(2.5).epsilon(1e-15));
    for (double a : {0.1, 1.0, 10.0}) {
        for (double bb : {0.1, 1.0, 10.0}) {
            double c = solve_scaling(a, bb);
            CHECK(std::abs(c - fixed_point_c(a, bb)) <= 1e-12 * c);
            CHECK(std::abs(std::sqrt(c) - 0.5 * (bb + std::sqrt(bb * bb + 4.0 * a))) <= 1e-12 * std::sqrt(c));
        }
    }
}

TEST_CASE("b = 0 collapses the limit system to the rescaled ground state")
{
    ProblemParams pr{1.0, 0.0, 3.0};
    auto sol = build_limit_system(pr, {WellData{{0, 0, 0}, 1.0}});
    CHECK(sol.c == 1.0);
    CHECK(sol.w_profiles[0].values() == sol.q_profiles[0].values());
    CHECK(sol.w_profiles[0].grid().nodes() == sol.q_profiles[0].grid().nodes());
    auto res = system_residual(sol);
    CHECK(std::abs(res[0] - radial::ode_residual_sup(sol.q_profiles[0])) <= 1e-8);

    // With a != 1 the rescaled profile is evaluated by the radial stencil in its own units.
    auto scaled = build_limit_system(ProblemParams{2.0, 0.0, 3.0}, {WellData{{0, 0, 0}, 1.0}});
    double rw = radial::ode_residual_sup(scaled.w_profiles[0]);
    double rq = radial::ode_residual_sup(scaled.q_profiles[0]);
    CHECK(std::abs(rw - rq) <= 1e-9);
    CHECK(std::abs(system_residual(scaled)[0] - rq) <= 1e-8);
}

TEST_CASE("two equal wells raise c above the single-well value")
{
    ProblemParams pr{1.0, 1.0, 3.0};
    auto one = build_limit_system(pr, {WellData{{0, 0, 0}, 1.0}});
    auto two = build_limit_system(pr, wells2(1.0, 1.0));
    CHECK(two.c > one.c);
    CHECK(two.b_bar == doctest::Approx(2.0 * one.b_bar).epsilon(1e-14));
}

TEST_CASE("limit system residual on an independent grid, V = (1.0, 1.2)")
{
    ProblemParams pr{1.0, 0.5, 3.0};
    auto sol = build_limit_system(pr, wells2(1.0, 1.2));
    auto res = system_residual(sol);
    REQUIRE(res.size() == 2);
    CHECK(res[0] <= 1e-7);
    CHECK(res[1] <= 1e-7);
    CHECK(sol.consistency <= 1e-12);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(sol.w_grad_sq[i] - std::sqrt(sol.c) * sol.q_grad_sq[i]) <= 1e-8 * sol.w_grad_sq[i]);
    }
    double s = std::sqrt(sol.c);
    CHECK(std::abs(s - 0.5 * (sol.b_bar + std::sqrt(sol.b_bar * sol.b_bar + 4.0))) <= 1e-12 * s);
}

TEST_CASE("residual detects an amplitude perturbation")
{
    ProblemParams pr{1.0, 0.5, 3.0};
    auto sol = build_limit_system(pr, wells2(1.0, 1.2));
    sol.w_profiles[0] = sol.w_profiles[0].scaled_amplitude(1.01);
    auto res = system_residual(sol);
    CHECK(res[0] >= 1e-3);
    CHECK(res[1] <= 1e-7);
}

TEST_CASE("c is invariant under permutation and translation of the wells")
{
    ProblemParams pr{1.0, 0.7, 3.0};
    std::vector<WellData> w{WellData{{0, 0, 0}, 1.3}, WellData{{2, 0, 0}, 1.0}, WellData{{0, 2, 0}, 1.1}};
    auto base = build_limit_system(pr, w);
    std::vector<WellData> perm{w[2], w[0], w[1]};
    for (auto& x : perm) {
        x.center = x.center + Vec3{5.0, -3.0, 1.0};
    }
    auto moved = build_limit_system(pr, perm);
    CHECK(base.c == moved.c);
}

TEST_CASE("single-well Kirchhoff constants")
{
    ProblemParams pr{1.0, 1.0, 3.0};
    auto single = solve_single_kirchhoff_all(pr, wells2(1.0, 1.0));
    auto sys = build_limit_system(pr, wells2(1.0, 1.0));
    double g = radial::grad_norm_sq(sys.q_profiles[0]);
    for (std::size_t i = 0; i < 2; ++i) {
        double ci = single.wells[i].c;
        CHECK(std::abs(ci - fixed_point_c(1.0, g)) <= 1e-12 * ci);
        CHECK(std::abs(ci - (1.0 + std::sqrt(ci) * g)) <= 1e-12 * ci);
        CHECK(ci < sys.c);
        CHECK(single.K[i] > 0.0);
    }
    CHECK(single.K[0] == doctest::Approx(single.wells[1].grad_sq));

    ProblemParams schr{1.0, 0.0, 3.0};
    auto u = solve_single_kirchhoff(schr, WellData{{0, 0, 0}, 1.0});
    auto w = build_limit_system(schr, {WellData{{0, 0, 0}, 1.0}});
    CHECK(u.profile.values() == w.w_profiles[0].values());
    CHECK(u.c == w.c);
}

TEST_CASE("invalid inputs are rejected")
{
    CHECK_THROWS_AS(build_limit_system(ProblemParams{0.0, 1.0, 3.0}, wells2(1, 1)), Error);
    CHECK_THROWS_AS(build_limit_system(ProblemParams{1.0, 1.0, 3.0}, {}), Error);
    CHECK_THROWS_AS(build_limit_system(ProblemParams{1.0, 1.0, 3.0}, {WellData{}, WellData{}}), Error);
}
