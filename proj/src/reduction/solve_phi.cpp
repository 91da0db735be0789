#include <algorithm>
#include <cmath>
#include <sstream>

#include "kpeaks/core/error.hpp"
#include "kpeaks/reduction/reduction.hpp"

namespace kpeaks::reduction {

void
ReductionSettings::validate(double theta) const
{
    require(grid.n >= 5, "reduction grid needs n >= 5");
    require(newton_tol > 0.0, "newton_tol must be positive");
    require(max_newton > 0, "max_newton must be positive");
    require(tau > 0.0 && tau < 0.5 * theta, "tau must lie in (0, theta / 2)");
    require(simplex_tol > 0.0, "simplex_tol must be positive");
}

namespace {

double
scaled(const BoxProblem& problem, double norm)
{
    return norm / std::pow(problem.eps(), 1.5);
}

void
check_constraints(const BoxProblem& problem, const Vector& phi, int iteration)
{
    auto res = problem.constraint_residuals(phi);
    double bound = 1e-10 * problem.eps_norm(phi);
    for (std::size_t m = 0; m < res.size(); ++m) {
        if (std::abs(res[m]) > bound && std::abs(res[m]) > 0.0) {
            std::ostringstream msg;
            msg << "constraint " << m << " residual " << res[m] << " exceeds " << bound << " at Newton iterate "
                << iteration;
            throw Error(ErrorCode::ConstraintDrift, msg.str());
        }
    }
}

} // namespace

PhiSolution
solve_phi(const BoxProblem& problem, const ReductionSettings& settings, const PhiOptions& options)
{
    double tol = options.tol > 0.0 ? options.tol : settings.newton_tol;
    PhiSolution out;
    out.phi = options.initial ? *options.initial : Vector(problem.size(), 0.0);
    require(out.phi.size() == problem.size(), "initial corrector has the wrong size");
    problem.boxes().clear_boundary(out.phi);
    problem.project(out.phi);
    check_constraints(problem, out.phi, 0);

    Vector G = problem.gradient(out.phi);
    Vector GE = problem.project_dual(G);
    double r = scaled(problem, problem.precond_dual_norm(GE));
    out.residual_history.push_back(r);
    int it = 0;
    for (;;) {
        if (r <= tol) {
            if (!options.diagnostics) {
                out.projected_residual = r;
                break;
            }
            double exact = scaled(problem, problem.dual_norm(GE));
            if (exact <= tol) {
                out.projected_residual = exact;
                break;
            }
        }
        if (it >= settings.max_newton) {
            std::ostringstream msg;
            msg << "no convergence in " << settings.max_newton << " Newton steps; last residual " << r;
            throw Error(ErrorCode::NewtonDiverged, msg.str());
        }
        ++it;
        Hessian hess = problem.hessian(out.phi);
        // G and G_E differ by C beta(G), which only shifts the multipliers; with -G_E the MINRES tolerance is
        // relative to the residual the stopping test measures.
        Vector rhs(GE.size());
        for (std::size_t i = 0; i < GE.size(); ++i) {
            rhs[i] = -GE[i];
        }
        Vector s;
        std::vector<double> beta;
        double rtol = std::clamp(1e-3 * tol / r, 1e-11, 1e-6);
        auto lin = problem.solve_constrained(hess, rhs, s, beta, rtol, settings.max_linear_iterations);
        out.linear_iterations += lin.iterations;
        problem.project(s);

        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt <= 20; ++bt) {
            Vector trial = out.phi;
            for (std::size_t i = 0; i < trial.size(); ++i) {
                trial[i] += t * s[i];
            }
            Vector Gt = problem.gradient(trial);
            Vector GEt = problem.project_dual(Gt);
            double rt = scaled(problem, problem.precond_dual_norm(GEt));
            if (rt < (1.0 - 1e-4 * t) * r) {
                out.phi = std::move(trial);
                G = std::move(Gt);
                GE = std::move(GEt);
                r = rt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "line search failed after 20 backtracks at Newton step " << it << "; last residual " << r;
            throw Error(ErrorCode::NewtonDiverged, msg.str());
        }
        check_constraints(problem, out.phi, it);
        out.residual_history.push_back(r);
    }
    out.newton_iterations = it;
    if (options.diagnostics) {
        out.unprojected_residual = scaled(problem, problem.dual_norm(G));
    }
    out.multipliers = problem.multipliers(G);
    out.norm_eps = problem.eps_norm(out.phi);
    out.projection_residuals = problem.constraint_residuals(out.phi);
    out.energy = problem.energy(out.phi);
    return out;
}

PhiSolution
solve_phi(const fields::AnsatzState& state, const fields::PotentialModel& model, const ReductionSettings& settings)
{
    BoxProblem problem(state, model, settings.grid);
    return solve_phi(problem, settings);
}

} // namespace kpeaks::reduction
