#include <doctest.h>

#include <cmath>
#include <numbers>

#include "golden_values.hpp"
#include "kpeaks/core/error.hpp"
#include "kpeaks/core/fd.hpp"
#include "kpeaks/radial/quadrature.hpp"
#include "kpeaks/radial/shooting.hpp"

using namespace kpeaks;
using namespace kpeaks::radial;

namespace {

const RadialProfile&
q3()
{
    static const RadialProfile p = solve_ground_state(1.0, 3.0);
    return p;
}

RadialProfile
gaussian_profile()
{
    RadialGrid grid = RadialGrid::geometric(1e-2, 1.02, 12.0);
    std::vector<double> u, du, d2u;
    for (double r : grid.nodes()) {
        double g = std::exp(-0.5 * r * r);
        u.push_back(g);
        du.push_back(-r * g);
        d2u.push_back((r * r - 1.0) * g);
    }
    return RadialProfile(grid, u, du, d2u, TailModel{0.0, 1.0, grid.r_max()}, ProfileEquation{});
}

double
rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

} // namespace

TEST_CASE("quintic hermite interpolation reproduces quintic polynomials")
{
    auto f = [](double r) { return 1.0 + 0.3 * r * r - 0.2 * r * r * r + 0.05 * std::pow(r, 5); };
    auto df = [](double r) { return 0.6 * r - 0.6 * r * r + 0.25 * std::pow(r, 4); };
    auto d2f = [](double r) { return 0.6 - 1.2 * r + std::pow(r, 3); };
    RadialGrid grid = RadialGrid::geometric(0.1, 1.1, 3.0);
    std::vector<double> u, du, d2u;
    for (double r : grid.nodes()) {
        u.push_back(f(r));
        du.push_back(df(r));
        d2u.push_back(d2f(r));
    }
    RadialProfile p(grid, u, du, d2u, TailModel{}, ProfileEquation{});
    for (double r : {0.013, 0.37, 1.234, 2.71}) {
        CHECK(p.value(r) == doctest::Approx(f(r)).epsilon(1e-13));
        CHECK(p.deriv(r) == doctest::Approx(df(r)).epsilon(1e-12));
        CHECK(p.second(r) == doctest::Approx(d2f(r)).epsilon(1e-11));
    }
}

TEST_CASE("finite-difference weights are exact on polynomials")
{
    std::vector<double> nodes{0.0, 0.1, 0.25, 0.3, 0.55, 0.6, 0.9};
    auto w = fd_weights(0.3, nodes, 1);
    double d = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        d += w[k] * std::pow(nodes[k], 6);
    }
    CHECK(d == doctest::Approx(6.0 * std::pow(0.3, 5)).epsilon(1e-10));
}

TEST_CASE("ground state matches the collocation reference, lambda = 1, p = 3")
{
    const auto& q = q3();
    CHECK(rel(q.peak(), golden::q3_peak) < 1e-9);
    CHECK(rel(grad_norm_sq(q), golden::q3_grad_sq) < 1e-8);
    CHECK(rel(lp_norm_pow(q, 2.0), golden::q3_l2_sq) < 1e-8);
    CHECK(rel(lp_norm_pow(q, 4.0), golden::q3_l4_pow) < 1e-8);
    CHECK(rel(q.value(2.0), golden::q3_at_2) < 1e-8);
}

TEST_CASE("ground state matches the collocation reference, lambda = 1, p = 2")
{
    RadialProfile q = solve_ground_state(1.0, 2.0);
    CHECK(rel(q.peak(), golden::q2_peak) < 1e-9);
    CHECK(rel(grad_norm_sq(q), golden::q2_grad_sq) < 1e-8);
    CHECK(rel(lp_norm_pow(q, 3.0), golden::q2_l3_pow) < 1e-8);
    CHECK(rel(q.value(2.0), golden::q2_at_2) < 1e-8);
}

TEST_CASE("ground state is positive, decreasing and resolves its residual")
{
    const auto& q = q3();
    const auto& u = q.values();
    for (std::size_t i = 1; i < u.size(); ++i) {
        REQUIRE(u[i] > 0.0);
        REQUIRE(u[i] < u[i - 1]);
    }
    CHECK(q.residual_sup <= 5e-9);
    CHECK(ode_residual_sup(q) == q.residual_sup);
    CHECK(q.grid().r_max() >= 30.0);
}

TEST_CASE("tail model decays at the linear rate and agrees with the grid")
{
    for (double lambda : {1.0, 2.5}) {
        RadialProfile q = solve_ground_state(lambda, 3.0);
        const auto& t = q.tail();
        CHECK(std::abs(t.rate - std::sqrt(lambda)) / std::sqrt(lambda) <= 0.02);
        CHECK(rel(t.value(t.r_match), q.value(t.r_match)) <= 1e-6);
        double rm = q.grid().r_max();
        CHECK(rel(t.value(rm), q.values().back()) <= 1e-6);
    }
}

TEST_CASE("lambda scaling law Q_lambda(r) = lambda^(1/(p-1)) Q_1(sqrt(lambda) r)")
{
    double lambda = 4.0;
    RadialProfile q = solve_ground_state(lambda, 3.0);
    for (double r : {0.0, 0.3, 1.0, 2.5}) {
        double expected = std::pow(lambda, 0.5) * q3().value(std::sqrt(lambda) * r);
        CHECK(rel(q.value(r), expected) < 1e-8);
    }
}

TEST_CASE("Nehari and Pohozaev identities for p = 3")
{
    const auto& q = q3();
    double g = grad_norm_sq(q);
    double l2 = lp_norm_pow(q, 2.0);
    double l4 = lp_norm_pow(q, 4.0);
    CHECK(rel(g, 0.75 * l4) < 1e-9);
    CHECK(rel(l2, 0.25 * l4) < 1e-9);
}

TEST_CASE("radial quadrature is exact for a Gaussian")
{
    RadialProfile g = gaussian_profile();
    double pi32 = std::pow(std::numbers::pi, 1.5);
    CHECK(rel(grad_norm_sq(g), 1.5 * pi32) < 1e-10);
    CHECK(rel(lp_norm_pow(g, 2.0), pi32) < 1e-10);
}

TEST_CASE("radial quadrature agrees with a brute-force Riemann sum")
{
    for (const RadialProfile* p : {&q3()}) {
        double rmax = p->grid().r_max();
        std::size_t n = 10000;
        double h = rmax / n;
        double sum = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            double r = i * h;
            double u = p->value(r);
            sum += (i == 0 || i == n ? 0.5 : 1.0) * u * u * r * r;
        }
        sum *= 4.0 * std::numbers::pi * h;
        CHECK(rel(sum, lp_norm_pow(*p, 2.0)) < 1e-5);
    }
}

TEST_CASE("rescaled profile solves the diffusion-scaled equation")
{
    RadialProfile w = q3().rescaled(1.7);
    CHECK(w.equation().diffusion == doctest::Approx(1.7 * 1.7));
    CHECK(ode_residual_sup(w) < 1e-8);
    CHECK(rel(grad_norm_sq(w), 1.7 * golden::q3_grad_sq) < 1e-8);
    CHECK(w.value(1.7 * 2.0) == doctest::Approx(q3().value(2.0)).epsilon(1e-14));
}

TEST_CASE("shooting reports its failure modes")
{
    CHECK_THROWS_AS(solve_ground_state(-1.0, 3.0), Error);
    ShootingOptions few;
    few.max_iterations = 3;
    try {
        solve_ground_state(1.0, 3.0, few);
        FAIL("expected MaxIterations");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MaxIterations);
    }
    ShootingOptions strict;
    strict.tol = 1e-18;
    try {
        solve_ground_state(1.0, 3.0, strict);
        FAIL("expected ResidualTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ResidualTooLarge);
    }
}

TEST_CASE("ode residual of the zero function vanishes and detects a single-node bump")
{
    RadialGrid grid = RadialGrid::geometric(5e-3, 1.02, 30.0);
    std::vector<double> zero(grid.size(), 0.0);
    RadialProfile z(grid, zero, zero, zero, TailModel{}, ProfileEquation{1.0, 3.0, 1.0, false});
    CHECK(ode_residual_sup(z) == 0.0);

    const auto& q = q3();
    std::vector<double> u = q.values();
    u[120] += 0.01;
    RadialProfile bumped(q.grid(), u, q.derivs(), q.seconds(), q.tail(), q.equation());
    CHECK(ode_residual_sup(bumped) >= 1e-3);
}
