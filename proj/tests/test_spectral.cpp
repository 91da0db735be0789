#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "kpeaks/core/error.hpp"
#include "kpeaks/spectral/spectral.hpp"

using namespace kpeaks;
using namespace kpeaks::spectral;

namespace {

limit::LimitSystemSolution
two_wells(double b)
{
    return limit::build_limit_system(limit::ProblemParams{1.0, b, 3.0},
                                     {limit::WellData{{-1.0, 0.0, 0.0}, 1.0}, limit::WellData{{1.0, 0.0, 0.0}, 1.2}});
}

const ModeSpectrum&
mode(const NondegeneracyReport& r, int ell)
{
    for (const auto& m : r.modes) {
        if (m.ell == ell) {
            return m;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "mode missing");
}

fields::AnsatzState
single_state(const fields::PotentialModel& model, double eps)
{
    fields::AnsatzState s;
    s.eps = eps;
    s.limit = std::make_shared<const limit::LimitSystemSolution>(
        limit::build_limit_system(limit::ProblemParams{1.0, 0.005, 3.0}, model.wells));
    s.Y = {model.wells[0].center};
    return s;
}

} // namespace

TEST_CASE("translation profile r w' lies in the ell = 1 kernel")
{
    auto lim = two_wells(0.5);
    for (std::size_t i = 0; i < 2; ++i) {
        auto rep = nondegeneracy_report(lim, i);
        CHECK(rep.translation_residual <= 1e-5);
        CHECK(rep.kernel_cosine >= 0.999);
        CHECK(rep.passed);
    }
}

TEST_CASE("kernel sits at ell = 1 only; one radial negative direction; ell = 2 positive")
{
    auto lim = two_wells(0.5);
    auto rep = nondegeneracy_report(lim, 1);
    const auto& l1 = mode(rep, 1);
    CHECK(l1.kernel_count == 1);
    CHECK(std::abs(l1.pairs.values[0]) <= 1e-6 * rep.scale);
    const auto& l0 = mode(rep, 0);
    CHECK(l0.kernel_count == 0);
    CHECK(std::abs(l0.pairs.values[0]) >= 0.01 * rep.scale);
    CHECK(l0.pairs.negative_count == 1);
    for (int ell : {2, 3}) {
        CHECK(mode(rep, ell).kernel_count == 0);
        CHECK(mode(rep, ell).pairs.negative_count == 0);
        CHECK(mode(rep, ell).pairs.values[0] > 0.0);
    }
}

TEST_CASE("radial operators are symmetric in the weighted inner product")
{
    auto lim = two_wells(0.5);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int ell : {0, 1, 2}) {
        auto m = build_lplus_radial(lim, 0, ell);
        for (int k = 0; k < 10; ++k) {
            Eigen::VectorXd x(m.size());
            Eigen::VectorXd y(m.size());
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                x(i) = nd(rng);
                y(i) = nd(rng);
            }
            double lhs = m.inner(m.apply(x), y);
            double rhs = m.inner(x, m.apply(y));
            CHECK(std::abs(lhs - rhs) <= 1e-10 * m.norm(m.apply(x)) * m.norm(y));
        }
    }
}

TEST_CASE("b = 0 drops the rank-one term at ell = 0")
{
    auto lim = two_wells(0.0);
    RadialOperatorOptions local;
    local.include_nonlocal = false;
    auto with = build_lplus_radial(lim, 0, 0);
    auto without = build_lplus_radial(lim, 0, 0, local);
    CHECK(with.stiffness == without.stiffness);
    CHECK(with.mass == without.mass);
}

TEST_CASE("rank-one term is invisible at ell >= 1 and active at ell = 0")
{
    auto lim = two_wells(0.5);
    RadialOperatorOptions local;
    local.include_nonlocal = false;
    for (int ell : {1, 2, 3}) {
        CHECK(build_lplus_radial(lim, 1, ell).stiffness == build_lplus_radial(lim, 1, ell, local).stiffness);
    }
    auto with = build_lplus_radial(lim, 1, 0);
    auto without = build_lplus_radial(lim, 1, 0, local);
    CHECK((with.stiffness - without.stiffness).norm() > 1e-6 * without.stiffness.norm());
}

TEST_CASE("ell >= 1 spectra do not depend on b (r -> r / sqrt(c) conjugates them)")
{
    auto schr = two_wells(0.0);
    auto kirch = two_wells(0.5);
    for (int ell : {1, 2}) {
        auto a = smallest_eigenpairs(build_lplus_radial(schr, 0, ell), 4);
        auto b = smallest_eigenpairs(build_lplus_radial(kirch, 0, ell), 4);
        for (std::size_t k = 1; k < 4; ++k) {
            CHECK(std::abs(a.values[k] - b.values[k]) <= 1e-6 * std::abs(a.values[k]));
        }
    }
}

TEST_CASE("coercivity on E: positive, stable under refinement, absent without the projection")
{
    auto model = fields::make_preset("single_well");
    auto state = single_state(model, 0.2);
    reduction::GridSettings coarse;
    coarse.n = 48;
    auto a = coercivity_check(state, model, coarse);
    reduction::GridSettings fine = coarse;
    fine.n = 64;
    fine.half_width = a.half_width;
    auto b = coercivity_check(state, model, fine);
    CHECK(a.rho_estimate > 0.0);
    CHECK(std::abs(b.rho_estimate - a.rho_estimate) <= 0.2 * a.rho_estimate);
    // The translation near-kernel survives without the projection and shrinks with h.
    CHECK(a.full_min_abs < 0.1 * a.rho_estimate);
    CHECK(b.full_min_abs < a.full_min_abs);
    // One negative direction (the ansatz amplitude) and a refinement-stable upper bound.
    CHECK(a.smallest < 0.0);
    CHECK(std::abs(b.upper_C - a.upper_C) <= 0.05 * a.upper_C);

    // Same nodes per peak width at smaller eps: the constant does not degrade beyond resolution noise.
    auto c = coercivity_check(single_state(model, 0.1), model, coarse);
    CHECK(c.rho_estimate >= 0.98 * a.rho_estimate);
}

TEST_CASE("coercivity rejects boxes that under-resolve the peak")
{
    auto model = fields::make_preset("single_well");
    auto state = single_state(model, 0.2);
    reduction::GridSettings g;
    g.n = 24;
    g.half_width = 4.0 * reduction::GridSettings{}.nodes_per_width;
    try {
        coercivity_check(state, model, g);
        FAIL("expected UnresolvedPeak");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnresolvedPeak);
    }
}
