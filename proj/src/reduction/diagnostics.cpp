#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/format.hpp"
#include "kpeaks/fields/spherical.hpp"
#include "kpeaks/radial/quadrature.hpp"
#include "kpeaks/reduction/reduction.hpp"
#include "kpeaks/simd/kernels.hpp"

namespace kpeaks::reduction {

namespace {

double
vdot(const Vector& x, const Vector& y)
{
    return simd::dot(x.data(), y.data(), x.size());
}

bool
in_any_box(const fields::PeakBoxes& boxes, const Vec3& x)
{
    for (const auto& c : boxes.centers()) {
        Vec3 d = x - c;
        if (std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])}) <= boxes.half_width()) {
            return true;
        }
    }
    return false;
}

bool
in_any_ball(const std::vector<Vec3>& centers, double radius, const Vec3& x)
{
    for (const auto& c : centers) {
        if (distance(x, c) < radius) {
            return true;
        }
    }
    return false;
}

/// Whether neighbour value v (lattice offset d, lexicographic) beats the center value c. Ties within rounding go
/// to the lower offset, so a peak centered between nodes yields exactly one lattice maximum.
bool
beats(double v, double c, int d)
{
    double tol = 1e-12 * std::abs(c);
    return v > c + tol || (v >= c - tol && d < 0);
}

/// Vertex offset (in units of h) of the parabola through three equally spaced values.
double
parabola_offset(double fm, double f0, double fp)
{
    double curv = fm - 2.0 * f0 + fp;
    return curv < 0.0 ? 0.5 * (fm - fp) / curv : 0.0;
}

} // namespace

double
default_energy_bound(const limit::LimitSystemSolution& limit, const limit::ProblemParams& params)
{
    require(!limit.w_profiles.empty(), "limit system has no profiles");
    const auto& w = limit.w_profiles.front();
    return 10.0 * (params.a * radial::grad_norm_sq(w) + radial::lp_norm_pow(w, 2.0));
}

MultipeakReport
multipeak_diagnostics(const BoxProblem& problem, const Vector& phi, const std::vector<Vec3>& wells,
                      const MultipeakSettings& settings)
{
    const auto& boxes = problem.boxes();
    const auto& W = problem.ansatz();
    const Vector& w = problem.sampled_ansatz();
    require(phi.empty() || phi.size() == w.size(), "corrector has the wrong size");
    require(wells.size() == boxes.count(), "one well per peak is required");
    double eps = problem.eps();
    Vector u = w;
    if (!phi.empty()) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] += phi[i];
        }
    }
    MultipeakReport out;
    double umax = *std::max_element(u.begin(), u.end());
    double floor = settings.maxima_floor * umax;

    // (i) Lattice maxima over the 26 neighbours inside the boxes, refined by per-axis parabolas.
    int n = boxes.n();
    std::size_t bs = boxes.box_size();
    double h = boxes.h();
    for (std::size_t b = 0; b < boxes.count(); ++b) {
        const double* ub = u.data() + b * bs;
        auto at = [&](int i, int j, int k) { return ub[i + n * (j + n * k)]; };
        for (int k = 1; k + 1 < n; ++k) {
            for (int j = 1; j + 1 < n; ++j) {
                for (int i = 1; i + 1 < n; ++i) {
                    double c = at(i, j, k);
                    if (c < floor) {
                        continue;
                    }
                    bool is_max = true;
                    for (int dk = -1; dk <= 1 && is_max; ++dk) {
                        for (int dj = -1; dj <= 1 && is_max; ++dj) {
                            for (int di = -1; di <= 1 && is_max; ++di) {
                                if ((di || dj || dk) && beats(at(i + di, j + dj, k + dk), c, di + n * (dj + n * dk))) {
                                    is_max = false;
                                }
                            }
                        }
                    }
                    if (!is_max) {
                        continue;
                    }
                    Vec3 x = boxes.node(b * bs + static_cast<std::size_t>(i + n * (j + n * k)));
                    x[0] += h * parabola_offset(at(i - 1, j, k), c, at(i + 1, j, k));
                    x[1] += h * parabola_offset(at(i, j - 1, k), c, at(i, j + 1, k));
                    x[2] += h * parabola_offset(at(i, j, k - 1), c, at(i, j, k + 1));
                    out.maxima.push_back(x);
                    out.maxima_values.push_back(c);
                }
            }
        }
    }

    // Outside the boxes u = W. One lattice covers the peaks and the exclusion balls; it feeds both the
    // maxima search and the supremum of clause (ii).
    double radius = settings.R * eps;
    out.tau = settings.tau_fraction * umax;
    Vec3 lo = wells.front();
    Vec3 hi = wells.front();
    for (const auto& y : W.centers()) {
        for (std::size_t c = 0; c < 3; ++c) {
            lo[c] = std::min(lo[c], y[c] - 1.5 * radius);
            hi[c] = std::max(hi[c], y[c] + 1.5 * radius);
        }
    }
    int m = settings.scan_n;
    Vec3 step{(hi[0] - lo[0]) / (m - 1), (hi[1] - lo[1]) / (m - 1), (hi[2] - lo[2]) / (m - 1)};
    std::vector<double> scan(static_cast<std::size_t>(m) * m * m);
    auto node = [&](int i, int j, int k) { return Vec3{lo[0] + i * step[0], lo[1] + j * step[1], lo[2] + k * step[2]}; };
    std::size_t plane = static_cast<std::size_t>(m) * m;
    parallel_blocks(static_cast<std::size_t>(m), [&](std::size_t k) {
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                scan[k * plane + static_cast<std::size_t>(i + m * j)] = W.value(node(i, j, static_cast<int>(k)));
            }
        }
    });
    auto sv = [&](int i, int j, int k) { return scan[static_cast<std::size_t>(i + m * (j + m * k))]; };
    double sup = 0.0;
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                Vec3 x = node(i, j, k);
                if (in_any_box(boxes, x)) {
                    continue;
                }
                double c = sv(i, j, k);
                if (!in_any_ball(W.centers(), radius, x)) {
                    sup = std::max(sup, std::abs(c));
                }
                if (i == 0 || j == 0 || k == 0 || i + 1 == m || j + 1 == m || k + 1 == m || c < floor) {
                    continue;
                }
                bool is_max = true;
                for (int dk = -1; dk <= 1 && is_max; ++dk) {
                    for (int dj = -1; dj <= 1 && is_max; ++dj) {
                        for (int di = -1; di <= 1 && is_max; ++di) {
                            if ((di || dj || dk) && beats(sv(i + di, j + dj, k + dk), c, di + m * (dj + m * dk))) {
                                is_max = false;
                            }
                        }
                    }
                }
                if (is_max) {
                    out.maxima.push_back(x);
                    out.maxima_values.push_back(c);
                }
            }
        }
    }
    // Box nodes outside the balls carry the corrector.
    for (std::size_t idx = 0; idx < u.size(); ++idx) {
        if (!in_any_ball(W.centers(), radius, boxes.node(idx))) {
            sup = std::max(sup, std::abs(u[idx]));
        }
    }
    // W decreases radially near each peak, so the sphere |x - y^j| = R eps is where the supremum sits.
    const int sphere_points = 2000;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (const auto& y : W.centers()) {
        for (int q = 0; q < sphere_points; ++q) {
            double zc = 1.0 - 2.0 * (q + 0.5) / sphere_points;
            double rc = std::sqrt(1.0 - zc * zc);
            Vec3 x = y + radius * Vec3{rc * std::cos(golden * q), rc * std::sin(golden * q), zc};
            if (!in_any_ball(W.centers(), radius * (1.0 - 1e-12), x)) {
                sup = std::max(sup, std::abs(W.value(x)));
            }
        }
    }
    out.outside_sup = sup;
    out.clause_ii = sup <= out.tau;

    // Assign maxima to wells: each well needs its own maximum within max_distance.
    out.distances.assign(wells.size(), std::numeric_limits<double>::infinity());
    std::vector<int> owner(out.maxima.size(), -1);
    for (std::size_t q = 0; q < out.maxima.size(); ++q) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < wells.size(); ++i) {
            double d = distance(out.maxima[q], wells[i]);
            if (d < best) {
                best = d;
                owner[q] = static_cast<int>(i);
            }
        }
        auto i = static_cast<std::size_t>(owner[q]);
        out.distances[i] = std::min(out.distances[i], best);
    }
    out.clause_i = out.maxima.size() == wells.size();
    for (std::size_t i = 0; i < wells.size(); ++i) {
        out.clause_i = out.clause_i && out.distances[i] <= settings.max_distance;
    }

    // (iii) int (eps^2 a |grad u|^2 + u^2): W analytically, the phi terms on the lattice (phi vanishes on
    // the box boundaries, so int grad W . grad phi = int (-Delta W) phi).
    double e2a = eps * eps * problem.a();
    fields::SphericalQuadrature quad(W);
    auto wparts = quad.integrate<2>([&](const Vec3& x) {
        auto s = W.eval(x);
        return std::array<double, 2>{dot(s.grad, s.grad), s.value * s.value};
    });
    double total = e2a * wparts[0] + wparts[1];
    if (!phi.empty()) {
        Vector lphi(phi.size());
        problem.apply_L(phi, lphi);
        double h3 = problem.h3();
        total += 2.0 * h3 * (e2a * vdot(problem.sampled_minus_laplacian(), phi) + vdot(w, phi));
        total += h3 * (e2a * vdot(phi, lphi) + vdot(phi, phi));
    }
    out.energy_ratio = total / std::pow(eps, 3);
    out.C_energy = settings.C_energy;
    out.clause_iii = out.energy_ratio <= out.C_energy;
    out.passed = out.clause_i && out.clause_ii && out.clause_iii;
    return out;
}

void
write_diagnostics_json(const MultipeakReport& report, const ReducedLandscape* landscape, const std::filesystem::path& path)
{
    nlohmann::ordered_json j;
    auto num = [](double x) { return nlohmann::ordered_json::parse(fmt17(x)); };
    auto vec = [&](const Vec3& v) { return nlohmann::ordered_json::array({num(v[0]), num(v[1]), num(v[2])}); };
    nlohmann::ordered_json maxima = nlohmann::ordered_json::array();
    for (std::size_t q = 0; q < report.maxima.size(); ++q) {
        maxima.push_back({{"position", vec(report.maxima[q])}, {"value", num(report.maxima_values[q])}});
    }
    nlohmann::ordered_json dist = nlohmann::ordered_json::array();
    for (double d : report.distances) {
        dist.push_back(num(d));
    }
    j["clause_i"] = {{"maxima", maxima}, {"well_distances", dist}, {"passed", report.clause_i}};
    j["clause_ii"] = {{"tau", num(report.tau)}, {"outside_sup", num(report.outside_sup)}, {"passed", report.clause_ii}};
    j["clause_iii"] = {{"energy_over_eps3", num(report.energy_ratio)},
                       {"C_energy", num(report.C_energy)},
                       {"passed", report.clause_iii}};
    j["passed"] = report.passed;
    if (landscape) {
        nlohmann::ordered_json peaks = nlohmann::ordered_json::array();
        for (const auto& y : landscape->argmin) {
            peaks.push_back(vec(y));
        }
        nlohmann::ordered_json d2 = nlohmann::ordered_json::array();
        for (double d : landscape->distances) {
            d2.push_back(num(d));
        }
        j["landscape"] = {{"eps", num(landscape->eps)},
                          {"delta", num(landscape->domain.delta)},
                          {"argmin", peaks},
                          {"j_min", num(landscape->j_min)},
                          {"distances", d2},
                          {"margin", num(landscape->margin)},
                          {"interior", landscape->interior},
                          {"phi_norm_over_eps15", num(landscape->phi.norm_eps / std::pow(landscape->eps, 1.5))},
                          {"projected_residual", num(landscape->phi.projected_residual)},
                          {"unprojected_residual", num(landscape->phi.unprojected_residual)},
                          {"polish_steps", landscape->polish_steps},
                          {"evaluations", landscape->points.size()}};
    }
    auto f = open_output(path);
    f << j.dump(2) << '\n';
}

CriticalPointReport
critical_point_check(const std::vector<ReducedLandscape>& landscapes, const fields::PotentialModel& model,
                     double tolerance)
{
    require(landscapes.size() >= 2, "critical point check needs landscapes at two eps values at least");
    for (const auto& w : model.wells) {
        if (w.local_shape == fields::LocalShape::hoelder_cusp) {
            throw Error(ErrorCode::GradAtCusp, "critical point check needs differentiable wells");
        }
    }
    std::vector<const ReducedLandscape*> sorted;
    for (const auto& l : landscapes) {
        sorted.push_back(&l);
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->eps > b->eps; });
    CriticalPointReport out;
    out.tolerance = tolerance;
    for (const auto* l : sorted) {
        out.eps.push_back(l->eps);
        out.peaks.push_back(l->argmin);
    }
    const auto& coarse = *sorted[sorted.size() - 2];
    const auto& fine = *sorted.back();
    require(coarse.eps > fine.eps && coarse.argmin.size() == fine.argmin.size(), "landscapes need distinct eps values");
    // y(eps) = y0 + C eps: y0 = (e1 y2 - e2 y1) / (e1 - e2).
    double e1 = coarse.eps;
    double e2 = fine.eps;
    out.passed = true;
    for (std::size_t i = 0; i < fine.argmin.size(); ++i) {
        Vec3 y0 = (1.0 / (e1 - e2)) * (e1 * fine.argmin[i] - e2 * coarse.argmin[i]);
        out.limits.push_back(y0);
        double g = norm(fields::grad_potential(model, y0));
        out.grad_norms.push_back(g);
        out.passed = out.passed && g <= out.tolerance;
    }
    return out;
}

RemainderSample
remainder_sample(const BoxProblem& problem, const Vector& phi)
{
    Vector zero(problem.size(), 0.0);
    Vector g0 = problem.gradient(zero);
    Hessian h0 = problem.hessian(zero);
    Vector hphi(phi.size());
    problem.apply_hessian(h0, phi, hphi);
    double h3 = problem.h3();
    RemainderSample out;
    out.eps = problem.eps();
    out.phi_norm = problem.eps_norm(phi);
    out.remainder = problem.energy(phi) - problem.energy(zero) - h3 * vdot(g0, phi) - 0.5 * h3 * vdot(phi, hphi);
    double p = problem.p();
    out.shape = std::pow(out.eps, -1.5 * (p - 1.0)) * std::pow(out.phi_norm, p + 1.0) +
                std::pow(out.eps, -1.5) * std::pow(out.phi_norm, 3.0);
    out.ratio = std::abs(out.remainder) / out.shape;
    return out;
}

} // namespace kpeaks::reduction
