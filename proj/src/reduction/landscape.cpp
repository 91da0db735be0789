#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/format.hpp"
#include "kpeaks/energy/energy.hpp"
#include "kpeaks/reduction/reduction.hpp"

namespace kpeaks::reduction {

ReducedEnergy::ReducedEnergy(const fields::PotentialModel& model, std::shared_ptr<const limit::LimitSystemSolution> limit,
                             double eps, const ReductionSettings& settings)
    : model_(&model)
    , limit_(std::move(limit))
    , eps_(eps)
    , settings_(settings)
{
    require(limit_ != nullptr, "reduced energy needs a limit system");
    require(eps_ > 0.0, "eps must be positive");
}

PhiSolution
ReducedEnergy::evaluate(const std::vector<Vec3>& Y, const PhiOptions& options)
{
    fields::AnsatzState state;
    state.eps = eps_;
    state.limit = limit_;
    state.Y = Y;
    problem_ = std::make_unique<BoxProblem>(state, *model_, settings_.grid);
    PhiOptions opts = options;
    // Boxes move with Y, so the previous corrector is a good start in the new frame.
    if (warm_.size() == problem_->size()) {
        opts.initial = &warm_;
    }
    PhiSolution sol = solve_phi(*problem_, settings_, opts);
    warm_ = sol.phi;
    points_.push_back(LandscapePoint{Y, sol.energy, sol.norm_eps, sol.newton_iterations});
    return sol;
}

double
ReducedEnergy::operator()(const std::vector<Vec3>& Y)
{
    PhiOptions opts;
    opts.tol = settings_.landscape_tol;
    opts.diagnostics = false;
    return evaluate(Y, opts).energy;
}

PhiSolution
ReducedEnergy::solve(const std::vector<Vec3>& Y)
{
    return evaluate(Y, PhiOptions{});
}

const BoxProblem&
ReducedEnergy::last_problem() const
{
    require(problem_ != nullptr, "no evaluation yet");
    return *problem_;
}

double
reduced_energy(const std::vector<Vec3>& Y, double eps, const fields::PotentialModel& model,
               std::shared_ptr<const limit::LimitSystemSolution> limit, const ReductionSettings& settings)
{
    ReducedEnergy j(model, std::move(limit), eps, settings);
    return j.solve(Y).energy;
}

namespace {

using Eigen::VectorXd;

std::vector<Vec3>
unpack(const VectorXd& x)
{
    std::vector<Vec3> Y(static_cast<std::size_t>(x.size() / 3));
    for (std::size_t i = 0; i < Y.size(); ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            Y[i][c] = x(static_cast<Eigen::Index>(3 * i + c));
        }
    }
    return Y;
}

VectorXd
pack(const std::vector<Vec3>& Y)
{
    VectorXd x(static_cast<Eigen::Index>(3 * Y.size()));
    for (std::size_t i = 0; i < Y.size(); ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            x(static_cast<Eigen::Index>(3 * i + c)) = Y[i][c];
        }
    }
    return x;
}

/// Radial projection of each y^i onto the closed ball B_delta(a_i); returns the total distance moved.
double
clamp_to_domain(const fields::PeakDomain& domain, std::vector<Vec3>& Y)
{
    double moved = 0.0;
    for (std::size_t i = 0; i < Y.size(); ++i) {
        Vec3 d = Y[i] - domain.centers[i];
        double r = norm(d);
        if (r > domain.delta) {
            Y[i] = domain.centers[i] + (domain.delta / r) * d;
            moved += r - domain.delta;
        }
    }
    return moved;
}

struct SimplexResult
{
    VectorXd x;
    double f = 0.0;
    bool converged = false;
};

/// Adaptive Nelder-Mead (dimension-dependent coefficients), stopping when every vertex lies within tol
/// (max-norm) of the best one or after max_evaluations.
template <class F>
SimplexResult
nelder_mead(F&& f, const VectorXd& x0, double step, double tol, int max_evaluations)
{
    Eigen::Index n = x0.size();
    double dn = static_cast<double>(n);
    const double reflect = 1.0;
    const double expand = 1.0 + 2.0 / dn;
    const double contract = 0.75 - 0.5 / dn;
    const double shrink = 1.0 - 1.0 / dn;
    std::vector<VectorXd> xs(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> fs(static_cast<std::size_t>(n + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i + 1)](i) += step;
    }
    int evals = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        fs[i] = f(xs[i]);
        ++evals;
    }
    std::vector<std::size_t> order(xs.size());
    for (;;) {
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const VectorXd& best = xs[order.front()];
        double diameter = 0.0;
        for (const auto& x : xs) {
            diameter = std::max(diameter, (x - best).lpNorm<Eigen::Infinity>());
        }
        if (diameter <= tol) {
            return SimplexResult{best, fs[order.front()], true};
        }
        if (evals >= max_evaluations) {
            return SimplexResult{best, fs[order.front()], false};
        }
        std::size_t worst = order.back();
        VectorXd centroid = VectorXd::Zero(n);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            centroid += xs[order[i]];
        }
        centroid /= dn;
        VectorXd xr = centroid + reflect * (centroid - xs[worst]);
        double fr = f(xr);
        ++evals;
        double f_best = fs[order.front()];
        double f_second_worst = fs[order[order.size() - 2]];
        if (fr < f_best) {
            VectorXd xe = centroid + expand * (xr - centroid);
            double fe = f(xe);
            ++evals;
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < f_second_worst) {
            xs[worst] = xr;
            fs[worst] = fr;
            continue;
        }
        bool outside = fr < fs[worst];
        VectorXd xc = outside ? VectorXd(centroid + contract * (xr - centroid))
                              : VectorXd(centroid - contract * (centroid - xs[worst]));
        double fc = f(xc);
        ++evals;
        if (fc < (outside ? fr : fs[worst])) {
            xs[worst] = xc;
            fs[worst] = fc;
            continue;
        }
        std::size_t b = order.front();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i != b) {
                xs[i] = xs[b] + shrink * (xs[i] - xs[b]);
                fs[i] = f(xs[i]);
                ++evals;
            }
        }
    }
}

/// Newton on the constraint multipliers beta(Y) = 0 (critical points of j_eps) with a forward-difference
/// Jacobian; each step keeps Y in D_delta and is accepted only if the unprojected residual decreases.
int
polish(ReducedEnergy& j, const fields::PeakDomain& domain, const ReductionSettings& settings, ReducedLandscape& out)
{
    auto to_vec = [](const std::vector<double>& b) { return Eigen::Map<const VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())); };
    int steps = 0;
    double fd = 1e-4 * domain.delta;
    while (steps < settings.max_polish && out.phi.unprojected_residual > settings.newton_tol) {
        VectorXd x = pack(out.argmin);
        VectorXd beta = to_vec(out.phi.multipliers);
        Eigen::Index m = x.size();
        Eigen::MatrixXd jac(m, m);
        for (Eigen::Index c = 0; c < m; ++c) {
            VectorXd xp = x;
            xp(c) += fd;
            auto sol = j.solve(unpack(xp));
            jac.col(c) = (to_vec(sol.multipliers) - beta) / fd;
        }
        VectorXd dx = jac.fullPivLu().solve(-beta);
        auto Y = unpack(x + dx);
        clamp_to_domain(domain, Y);
        auto sol = j.solve(Y);
        ++steps;
        if (!(sol.unprojected_residual < out.phi.unprojected_residual)) {
            break;
        }
        out.argmin = Y;
        out.j_min = sol.energy;
        out.phi = std::move(sol);
    }
    return steps;
}

} // namespace

ReducedLandscape
explore_j(ReducedEnergy& j, const fields::PeakDomain& domain, const ReductionSettings& settings)
{
    domain.validate();
    ReducedLandscape out;
    out.eps = j.eps();
    out.domain = domain;
    double eps3 = std::pow(j.eps(), 3);
    // Outside D_delta the objective is j at the radial projection plus a linear penalty much steeper than
    // the potential-driven slope eps^3 C2 |grad V|, so the simplex never prefers points outside.
    double penalty = 1e3 * eps3;
    auto objective = [&](const VectorXd& x) {
        auto Y = unpack(x);
        double moved = clamp_to_domain(domain, Y);
        return j(Y) + penalty * moved;
    };

    std::vector<VectorXd> starts{pack(domain.centers)};
    std::mt19937_64 rng(settings.seed);
    std::normal_distribution<double> nd;
    for (int s = 0; s < settings.perturbed_starts; ++s) {
        std::vector<Vec3> Y = domain.centers;
        for (auto& y : Y) {
            Vec3 d{nd(rng), nd(rng), nd(rng)};
            y = y + (0.3 * domain.delta / norm(d)) * d;
        }
        starts.push_back(pack(Y));
    }
    double step = 0.25 * domain.delta;
    SimplexResult best;
    best.f = std::numeric_limits<double>::infinity();
    for (const auto& x0 : starts) {
        auto res = nelder_mead(objective, x0, step, settings.simplex_tol, settings.max_simplex_evaluations);
        out.start_minima.push_back(res.f);
        out.simplex_converged = out.simplex_converged && res.converged;
        if (res.f < best.f) {
            best = res;
        }
    }
    out.argmin = unpack(best.x);
    clamp_to_domain(domain, out.argmin);
    out.phi = j.solve(out.argmin);
    out.j_min = out.phi.energy;
    out.margin = domain.margin(out.argmin);
    out.interior = out.margin >= 0.05 * domain.delta;
    if (out.interior) {
        out.polish_steps = polish(j, domain, settings, out);
        out.margin = domain.margin(out.argmin);
        out.interior = out.margin >= 0.05 * domain.delta;
    }
    for (std::size_t i = 0; i < out.argmin.size(); ++i) {
        out.distances.push_back(distance(out.argmin[i], domain.centers[i]));
    }
    out.points = j.points();
    return out;
}

ReducedLandscape
minimize_j(ReducedEnergy& j, const fields::PeakDomain& domain, const ReductionSettings& settings)
{
    ReducedLandscape out = explore_j(j, domain, settings);
    if (!out.interior) {
        std::ostringstream msg;
        msg << "argmin of j_eps lies within 0.05 delta of the boundary of D_delta (margin " << out.margin
            << ", delta " << domain.delta << ")";
        throw Error(ErrorCode::BoundaryMinimum, msg.str());
    }
    return out;
}

void
write_landscape_csv(const ReducedLandscape& landscape, const std::filesystem::path& path)
{
    auto f = open_output(path);
    std::size_t k = landscape.domain.centers.size();
    for (std::size_t i = 0; i < k; ++i) {
        f << 'y' << i + 1 << "_x,y" << i + 1 << "_y,y" << i + 1 << "_z,";
    }
    f << "j_eps,phi_norm,newton_iters\n";
    for (const auto& p : landscape.points) {
        for (const auto& y : p.Y) {
            f << fmt17(y[0]) << ',' << fmt17(y[1]) << ',' << fmt17(y[2]) << ',';
        }
        f << fmt17(p.j) << ',' << fmt17(p.phi_norm) << ',' << p.newton_iterations << '\n';
    }
}

} // namespace kpeaks::reduction
