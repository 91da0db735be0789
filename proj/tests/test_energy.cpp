#include <doctest.h>

#include <cmath>
#include <memory>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/fit.hpp"
#include "kpeaks/energy/energy.hpp"
#include "kpeaks/radial/quadrature.hpp"

using namespace kpeaks;
using namespace kpeaks::energy;
using fields::AnsatzState;
using fields::make_preset;

namespace {

std::shared_ptr<const limit::LimitSystemSolution>
limit_for(const PotentialModel& m, const ProblemParams& pr)
{
    return std::make_shared<const limit::LimitSystemSolution>(limit::build_limit_system(pr, m.wells));
}

AnsatzState
state_at_wells(const PotentialModel& m, const ProblemParams& pr, double eps)
{
    AnsatzState s;
    s.eps = eps;
    s.limit = limit_for(m, pr);
    for (const auto& w : m.wells) {
        s.Y.push_back(w.center);
    }
    return s;
}

std::vector<Vec3>
zeros(std::size_t k)
{
    return std::vector<Vec3>(k, Vec3{0.0, 0.0, 0.0});
}

} // namespace

TEST_CASE("energy functional: zero field, positive part and backend dispatch")
{
    auto m = make_preset("single_well");
    ProblemParams pr{1.0, 0.005, 3.0};
    auto s = state_at_wells(m, pr, 0.1);
    PeakSet W = fields::assemble_ansatz(s);
    CHECK(energy_functional(W.scaled(0.0), 0.1, m, pr) == 0.0);
    fields::Field3D zero(fields::BoxSpec{{0.0, 0.0, 0.0}, 1.0, 16});
    CHECK(energy_functional(zero, 0.1, m, pr) == 0.0);

    auto plus = energy_parts(W, m, pr, settings_for(m));
    auto minus = energy_parts(W.scaled(-1.0), m, pr, settings_for(m));
    CHECK(minus.nonlinear == 0.0);
    CHECK(minus.grad_sq == doctest::Approx(plus.grad_sq).epsilon(1e-15));
    CHECK(minus.potential == doctest::Approx(plus.potential).epsilon(1e-15));

    FieldInput only_peaks{&W, nullptr};
    CHECK_NOTHROW(energy_functional(only_peaks, Backend::spherical, 0.1, m, pr));
    try {
        energy_functional(only_peaks, Backend::box, 0.1, m, pr);
        FAIL("expected BackendMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BackendMismatch);
    }
}

TEST_CASE("energy functional: exact single peak at constant potential")
{
    auto m = make_preset("constant");
    ProblemParams pr{1.0, 0.0, 3.0};
    for (double eps : {0.2, 0.05}) {
        auto s = state_at_wells(m, pr, eps);
        s.Y[0] = {0.1, -0.2, 0.3};
        double I = energy_functional(fields::assemble_ansatz(s), eps, m, pr);
        double expected = eps * eps * eps * (0.5 - 0.25) * radial::lp_norm_pow(s.limit->w_profiles[0], 4.0);
        CHECK(I == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("energy functional: box backend converges to the spherical value")
{
    auto m = make_preset("single_well");
    ProblemParams pr{1.0, 0.005, 3.0};
    double eps = 0.2;
    auto s = state_at_wells(m, pr, eps);
    PeakSet W = fields::assemble_ansatz(s);
    double ref = energy_functional(W, eps, m, pr);
    // Second-order lattice sums: the error shrinks at least threefold per halving of h.
    std::vector<double> E;
    for (int n : {97, 193}) {
        fields::Field3D F = fields::sample_on_box(W, fields::BoxSpec{{0.0, 0.0, 0.0}, 5.5, n});
        E.push_back(energy_functional(F, eps, m, pr));
    }
    CHECK(std::abs(E[1] - ref) < std::abs(E[0] - ref) / 3.0);
    // Removing the h^2 term must bring the lattice value closer to the spherical one.
    double extrapolated = (4.0 * E[1] - E[0]) / 3.0;
    CHECK(std::abs(extrapolated - ref) < 0.6 * std::abs(E[1] - ref));
    CHECK(std::abs(extrapolated - ref) <= 0.03 * std::abs(ref));
}

TEST_CASE("expansion constants: closed forms, symmetry and translation invariance")
{
    auto one = make_preset("single_well");
    ProblemParams b0{1.0, 0.0, 3.0};
    auto l1 = limit_for(one, b0);
    auto k1 = expansion_constants(*l1, b0);
    const auto& w = l1->w_profiles[0];
    CHECK(k1.C1 == doctest::Approx(0.25 * radial::lp_norm_pow(w, 4.0)).epsilon(1e-14));
    CHECK(k1.C2[0] == 0.5 * radial::lp_norm_pow(w, 2.0));

    ProblemParams pr{1.0, 0.005, 3.0};
    auto two = make_preset("two_well_quadratic");
    auto l2 = limit_for(two, pr);
    auto k2 = expansion_constants(*l2, pr);
    CHECK(std::abs(k2.C2[0] - k2.C2[1]) <= 1e-10 * k2.C2[0]);
    CHECK(k2.C2[0] > 0.0);
    CHECK(k2.theta == 1.0);

    auto shifted = two.wells;
    for (auto& wd : shifted) {
        wd.center = wd.center + Vec3{3.0, -1.0, 0.5};
    }
    auto l3 = limit::build_limit_system(pr, shifted);
    auto k3 = expansion_constants(l3, pr);
    CHECK(k3.C1 == k2.C1);
    CHECK(k3.C2 == k2.C2);

    auto cusp = make_preset("two_well_hoelder(0.5)");
    CHECK(expansion_constants(*limit_for(cusp, pr), pr).theta == 0.5);
}

TEST_CASE("expansion scan: remainder order and the linear potential term")
{
    ProblemParams pr{1.0, 0.005, 3.0};
    std::vector<double> eps{0.2, 0.1, 0.05, 0.025};

    auto quad = make_preset("two_well_quadratic");
    auto s = state_at_wells(quad, pr, 0.1);
    auto rep = expansion_scan(s, quad, eps, zeros(2));
    CHECK(rep.fitted_order >= 3.5);

    Vec3 up{0.0, 1.0, 0.0};
    std::vector<Vec3> off;
    for (std::size_t j = 0; j < 2; ++j) {
        off.push_back(fields::offset_for_gap(quad, j, up, 1e-2) - quad.wells[j].center);
    }
    auto lin = linear_term_scan(s, quad, eps, off);
    CHECK(lin.relative_error.back() <= 0.05);
    CHECK(lin.relative_error[2] <= 0.05);

    auto flat = make_preset("two_well_constant");
    auto sc = state_at_wells(flat, pr, 0.1);
    auto rc = expansion_scan(sc, flat, eps, zeros(2));
    CHECK(rc.fitted_order >= 4.0);

    CHECK_THROWS_AS(expansion_scan(s, quad, {0.1, 0.2, 0.05, 0.025}, zeros(2)), Error);
}

TEST_CASE("l_eps: vanishes at an exact solution and matches the energy derivative")
{
    ProblemParams pr{1.0, 0.005, 3.0};
    auto flat = make_preset("constant");
    double eps = 0.1;
    auto s = state_at_wells(flat, pr, eps);
    PeakSet W = fields::assemble_ansatz(s);
    // Off-center Gaussian test function.
    Vec3 c{0.05, 0.02, -0.03};
    double width = 0.15;
    TestField bump = [&](const Vec3& x) {
        Vec3 d = x - c;
        double g = std::exp(-dot(d, d) / (width * width));
        FieldSample f;
        f.value = g;
        f.grad = (-2.0 * g / (width * width)) * d;
        return f;
    };
    double l = l_eps(W, bump, eps, flat, pr);
    double nrm = std::sqrt(eps_norm_sq(W, bump, eps, flat, pr));
    CHECK(std::abs(l) <= 1e-6 * nrm * std::pow(eps, 1.5));

    auto quad = make_preset("two_well_quadratic");
    auto s2 = state_at_wells(quad, pr, eps);
    PeakSet W2 = fields::assemble_ansatz(s2);
    TestField self = [&](const Vec3& x) { return W2.eval(x); };
    double lw = l_eps(W2, self, eps, quad, pr);
    double t = 1e-4;
    double fd = (energy_functional(W2.scaled(1.0 + t), eps, quad, pr) - energy_functional(W2.scaled(1.0 - t), eps, quad, pr)) /
                (2.0 * t);
    CHECK(lw == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("pohozaev: constant potential, tilted well and angular refinement")
{
    ProblemParams pr{1.0, 0.005, 3.0};
    auto flat = make_preset("constant");
    double eps = 0.1;
    auto s = state_at_wells(flat, pr, eps);
    PeakSet W = fields::assemble_ansatz(s);
    auto rep = pohozaev_residual(W, eps, flat, pr, {0.0, 0.0, 0.0}, 0.5, settings_for(flat));
    CHECK(rep.residual <= 1e-6 * eps * eps * eps);

    auto tilted = make_preset("tilted_well(0.1)");
    auto st = state_at_wells(tilted, pr, eps);
    double target = 0.1 * radial::lp_norm_pow(st.limit->w_profiles[0], 2.0);
    double prev = INFINITY;
    for (double e : {0.1, 0.05, 0.025}) {
        PeakSet Wt(e, st.Y, st.limit->w_profiles);
        auto r = pohozaev_residual(Wt, e, tilted, pr, {0.0, 0.0, 0.0}, 0.5, settings_for(tilted));
        double err = std::abs(r.lhs[0] / (e * e * e) - target) / target;
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev <= 0.1);

    PeakSet Wt(eps, st.Y, st.limit->w_profiles);
    auto coarse = settings_for(tilted);
    auto fine = coarse;
    fine.n_theta *= 2;
    fine.n_phi *= 2;
    auto r1 = pohozaev_residual(Wt, eps, tilted, pr, {0.0, 0.0, 0.0}, 0.5, coarse);
    auto r2 = pohozaev_residual(Wt, eps, tilted, pr, {0.0, 0.0, 0.0}, 0.5, fine);
    CHECK(std::abs(r1.residual - r2.residual) <= 1e-8);
}

TEST_CASE("nonexistence defect: naive ansatz keeps an O(1) defect, the system ansatz does not")
{
    auto m = make_preset("two_well_quadratic");
    ProblemParams pr{1.0, 1.0, 3.0};
    std::vector<double> eps{0.004, 0.002, 0.001, 0.0005};
    auto scan = nonexistence_defect(pr, m, eps);
    std::size_t n = eps.size();
    for (std::size_t j = 0; j < 2; ++j) {
        double oracle = scan.oracle[j];
        CHECK(std::abs(scan.naive_ratio[n - 1][j] - oracle) <= 0.05 * oracle);
        CHECK(std::abs(scan.naive_ratio[n - 2][j] - oracle) <= 0.05 * oracle);
        CHECK(std::abs(scan.system_ratio[n - 1][j]) <= 0.1 * oracle);
    }
    std::vector<double> sys;
    for (const auto& r : scan.system_ratio) {
        sys.push_back(r[0]);
    }
    CHECK(fit_loglog_slope(eps, sys) >= 1.0);

    ProblemParams b0{1.0, 0.0, 3.0};
    auto plain = nonexistence_defect(b0, m, {0.1, 0.05, 0.025, 0.0125});
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(plain.naive_ratio[i] == plain.system_ratio[i]);
    }
    CHECK(std::abs(plain.naive_ratio[3][0]) < std::abs(plain.naive_ratio[2][0]));
    CHECK(plain.oracle[0] == 0.0);
}
