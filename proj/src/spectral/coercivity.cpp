#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <functional>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/format.hpp"
#include "kpeaks/simd/kernels.hpp"
#include "kpeaks/spectral/spectral.hpp"

namespace kpeaks::spectral {

namespace {

double
vdot(const Vector& x, const Vector& y)
{
    return simd::dot(x.data(), y.data(), x.size());
}

/// Extreme Ritz values of a B-self-adjoint operator A (restricted to E when projected).
struct LanczosOutcome
{
    double smallest = 0.0;
    /// Largest Ritz value: a lower bound for the top of the spectrum; the dense high-frequency end
    /// converges slowly, so it is accurate to about 1e-3 only.
    double largest = 0.0;
    int steps = 0;
};

/// Runs until the smallest Ritz pair has residual below settings.tol times the spectral scale.
/// `apply` maps v to A v and must return a vector in the same space (A = B^{-1} H or its square).
LanczosOutcome
lanczos(const reduction::BoxProblem& problem, const std::function<Vector(const Vector&)>& apply, bool projected,
        const LanczosSettings& settings)
{
    std::size_t n = problem.size();
    std::mt19937_64 rng(settings.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vector v(n);
    for (auto& x : v) {
        x = unif(rng);
    }
    problem.boxes().clear_boundary(v);
    if (projected) {
        problem.project(v);
    }
    Vector bv(n);
    problem.apply_B(v, bv);
    double nv = std::sqrt(vdot(v, bv));
    for (std::size_t i = 0; i < n; ++i) {
        v[i] /= nv;
        bv[i] /= nv;
    }
    std::vector<Vector> V{v};
    std::vector<Vector> BV{bv};
    std::vector<double> alpha;
    std::vector<double> beta;
    const auto& k = simd::active_kernels();
    for (int j = 0; j < settings.max_steps; ++j) {
        Vector w = apply(V.back());
        if (projected) {
            problem.project(w);
        }
        alpha.push_back(vdot(w, BV.back()));
        // Full reorthogonalization, twice, in the B-inner product.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < V.size(); ++i) {
                k.axpy(-vdot(w, BV[i]), V[i].data(), w.data(), n);
            }
        }
        Vector bw(n);
        problem.apply_B(w, bw);
        double b = std::sqrt(std::max(0.0, vdot(w, bw)));
        int steps = j + 1;
        bool last = steps == settings.max_steps || b == 0.0;
        if ((steps >= settings.min_steps && steps % settings.check_every == 0) || last) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
            for (int i = 0; i < steps; ++i) {
                T(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < steps) {
                    T(i, i + 1) = beta[static_cast<std::size_t>(i)];
                    T(i + 1, i) = beta[static_cast<std::size_t>(i)];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            const auto& theta = es.eigenvalues();
            double scale = std::max(std::abs(theta(0)), std::abs(theta(steps - 1)));
            if (std::abs(b * es.eigenvectors()(steps - 1, 0)) <= settings.tol * scale || b == 0.0) {
                return LanczosOutcome{theta(0), theta(steps - 1), steps};
            }
            if (last) {
                std::ostringstream msg;
                msg << "Lanczos did not converge the bottom eigenvalue in " << steps << " steps (residual "
                    << std::abs(b * es.eigenvectors()(steps - 1, 0)) / scale << ")";
                throw Error(ErrorCode::NoConvergence, msg.str());
            }
        }
        beta.push_back(b);
        for (std::size_t i = 0; i < n; ++i) {
            w[i] /= b;
            bw[i] /= b;
        }
        V.push_back(std::move(w));
        BV.push_back(std::move(bw));
    }
    throw Error(ErrorCode::NoConvergence, "Lanczos budget exhausted");
}

} // namespace

CoercivityReport
coercivity_check(const fields::AnsatzState& state, const fields::PotentialModel& model,
                 const reduction::GridSettings& grid, const LanczosSettings& settings)
{
    reduction::BoxProblem problem(state, model, grid);
    Vector zero(problem.size(), 0.0);
    reduction::Hessian hess = problem.hessian(zero);
    // A = B^{-1} H is self-adjoint in the B-inner product; <A^2 phi, phi>_B = ||H phi||_*^2, so the
    // bottom of A^2 gives the best rho in ||H phi||_* >= rho ||phi||_eps. Its eigenvalues of A on E
    // would be ill-posed instead: the analytic constraints miss the discrete near-kernel by O(h^2 + eps),
    // and the interlaced constrained eigenvalues can then sit anywhere near zero.
    auto apply_A = [&](const Vector& v) {
        Vector hv(v.size());
        problem.apply_hessian(hess, v, hv);
        return problem.solve_B(hv, 1e-11);
    };
    auto apply_A2 = [&](const Vector& v) { return apply_A(apply_A(v)); };
    auto linear = lanczos(problem, apply_A, true, settings);
    auto squared = lanczos(problem, apply_A2, true, settings);
    auto full = lanczos(problem, apply_A2, false, settings);
    CoercivityReport out;
    out.eps = state.eps;
    out.Y = state.Y;
    out.n = grid.n;
    out.h = problem.boxes().h();
    out.half_width = problem.boxes().half_width();
    out.rho_estimate = std::sqrt(std::max(0.0, squared.smallest));
    out.smallest = linear.smallest;
    out.upper_C = linear.largest;
    out.full_min_abs = std::sqrt(std::max(0.0, full.smallest));
    out.lanczos_steps = linear.steps + squared.steps + full.steps;
    return out;
}

void
write_coercivity_csv(const std::vector<CoercivityReport>& reports, const std::filesystem::path& path)
{
    auto f = open_output(path);
    f << "eps,n,rho_estimate,upper_C\n";
    for (const auto& r : reports) {
        f << fmt17(r.eps) << ',' << r.n << ',' << fmt17(r.rho_estimate) << ',' << fmt17(r.upper_C) << '\n';
    }
}

} // namespace kpeaks::spectral
