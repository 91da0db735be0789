#include "kpeaks/reduction/box_problem.hpp"

#include <algorithm>
#include <cmath>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/parallel.hpp"
#include "kpeaks/energy/energy.hpp"
#include "kpeaks/simd/kernels.hpp"

namespace kpeaks::reduction {

namespace {

double
vdot(const Vector& x, const Vector& y)
{
    return simd::dot(x.data(), y.data(), x.size());
}

double
pos_pow(double x, double e)
{
    return x > 0.0 ? std::pow(x, e) : 0.0;
}

fields::PeakBoxes
make_boxes(const fields::AnsatzState& state, const GridSettings& grid)
{
    require(grid.n >= 5, "box lattice needs n >= 5");
    double width = state.eps * std::sqrt(state.limit->c);
    double L = grid.half_width > 0.0 ? grid.half_width
                                     : fields::PeakBoxes::half_width_for(width, grid.n, grid.nodes_per_width);
    double h = 2.0 * L / (grid.n - 1);
    if (width / h < 8.0 * (1.0 - 1e-12)) {
        throw Error(ErrorCode::UnresolvedPeak, "lattice spacing " + std::to_string(h) + " leaves fewer than 8 nodes across the peak width " +
                                                   std::to_string(width));
    }
    return fields::PeakBoxes(state.Y, L, grid.n);
}

} // namespace

BoxProblem::BoxProblem(const fields::AnsatzState& state, const fields::PotentialModel& model, const GridSettings& grid)
    : model_(&model)
    , ansatz_((state.validate(), fields::assemble_ansatz(state)))
    , boxes_(make_boxes(state, grid))
    , helmholtz_(std::make_shared<fields::DirichletHelmholtz>(grid.n, boxes_.h()))
    , eps_(state.eps)
    , a_(state.limit->params.a)
    , b_(state.limit->params.b)
    , p_(state.limit->params.p)
{
    double h = boxes_.h();
    h3_ = h * h * h;
    inv_h2_ = 1.0 / (h * h);
    // 16 x 32 angular nodes agree with 32 x 64 to 5e-11 in I_eps(W) at half the cost of the default rule.
    auto quad = energy::settings_for(model);
    quad.n_theta = 16;
    quad.n_phi = 32;
    auto parts = energy::energy_parts(ansatz_, model, state.limit->params, quad);
    energy_w_ = energy::assemble_energy(parts, eps_, state.limit->params);
    grad_w_ = parts.grad_sq;
    for (const auto& y : state.Y) {
        sigma_.push_back(fields::eval_potential(model, y));
    }

    // One pass over the nodes: W, -Delta W and the analytic translation derivatives of the own peak.
    std::size_t k = boxes_.count();
    std::size_t bs = boxes_.box_size();
    w_.assign(size(), 0.0);
    v_.assign(size(), 0.0);
    g_.assign(size(), 0.0);
    z_.assign(3 * k, Vector(size(), 0.0));
    std::size_t slab = static_cast<std::size_t>(grid.n) * grid.n;
    parallel_blocks(k * grid.n, [&](std::size_t sl) {
        std::size_t own = sl * slab / bs;
        for (std::size_t idx = sl * slab; idx < (sl + 1) * slab; ++idx) {
            Vec3 x = boxes_.node(idx);
            fields::FieldSample total;
            for (std::size_t i = 0; i < k; ++i) {
                fields::FieldSample si = ansatz_.eval_peak(i, x);
                total.value += si.value;
                total.laplacian += si.laplacian;
                if (i == own && !boxes_.on_boundary(idx)) {
                    for (std::size_t j = 0; j < 3; ++j) {
                        z_[3 * i + j][idx] = -si.grad[j];
                    }
                }
            }
            w_[idx] = total.value;
            v_[idx] = fields::eval_potential(model, x);
            g_[idx] = boxes_.on_boundary(idx) ? 0.0 : -total.laplacian;
        }
    });
    for (const auto& z : z_) {
        Vector bz(size());
        apply_B(z, bz);
        bz_.push_back(std::move(bz));
    }
    std::size_t m = z_.size();
    Eigen::MatrixXd gram(m, m);
    z_norm_.resize(static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c <= r; ++c) {
            double v = vdot(z_[r], bz_[c]);
            gram(r, c) = v;
            gram(c, r) = v;
        }
        z_norm_(static_cast<Eigen::Index>(r)) = std::sqrt(h3_ * gram(r, r));
    }
    gram_.compute(gram);
}

void
BoxProblem::apply_L(const Vector& x, Vector& y) const
{
    const auto& k = simd::active_kernels();
    std::size_t bs = boxes_.box_size();
    for (std::size_t b = 0; b < boxes_.count(); ++b) {
        k.neg_laplacian(x.data() + b * bs, y.data() + b * bs, boxes_.n(), inv_h2_);
    }
}

void
BoxProblem::apply_B(const Vector& x, Vector& y) const
{
    const auto& k = simd::active_kernels();
    std::size_t bs = boxes_.box_size();
    double alpha = eps_ * eps_ * a_;
    for (std::size_t b = 0; b < boxes_.count(); ++b) {
        k.helmholtz(x.data() + b * bs, y.data() + b * bs, v_.data() + b * bs, alpha, boxes_.n(), inv_h2_);
    }
}

void
BoxProblem::apply_hessian(const Hessian& hess, const Vector& x, Vector& y) const
{
    const auto& k = simd::active_kernels();
    std::size_t bs = boxes_.box_size();
    for (std::size_t b = 0; b < boxes_.count(); ++b) {
        k.helmholtz(x.data() + b * bs, y.data() + b * bs, hess.diag.data() + b * bs, hess.alpha, boxes_.n(), inv_h2_);
    }
    if (hess.rank_coef != 0.0) {
        double s = hess.rank_coef * h3_ * vdot(hess.u, x);
        k.axpy(s, hess.u.data(), y.data(), y.size());
    }
}

void
BoxProblem::apply_precond(const Vector& r, Vector& y, double alpha) const
{
    std::size_t bs = boxes_.box_size();
    for (std::size_t b = 0; b < boxes_.count(); ++b) {
        helmholtz_->solve(r.data() + b * bs, y.data() + b * bs, alpha, sigma_[b]);
    }
}

Vector
BoxProblem::solve_B(const Vector& rhs, double rtol) const
{
    Vector x(size(), 0.0);
    double alpha = eps_ * eps_ * a_;
    auto res = pcg([&](const Vector& in, Vector& out) { apply_B(in, out); },
                   [&](const Vector& in, Vector& out) { apply_precond(in, out, alpha); }, rhs, x, rtol, 500);
    if (!res.converged) {
        throw Error(ErrorCode::NoConvergence, "CG for the eps-inner product stalled at relative residual " +
                                                  std::to_string(res.relative_residual));
    }
    return x;
}

double
BoxProblem::energy(const Vector& phi) const
{
    Vector lphi(size());
    apply_L(phi, lphi);
    double q = h3_ * vdot(g_, phi);
    double g_phi = h3_ * vdot(phi, lphi);
    double pp = p_ + 1.0;
    double local = h3_ * deterministic_sum(size(), [&](std::size_t b, std::size_t e) {
                       double s = 0.0;
                       for (std::size_t i = b; i < e; ++i) {
                           double u = w_[i] + phi[i];
                           s += v_[i] * (w_[i] * phi[i] + 0.5 * phi[i] * phi[i]) -
                                (pos_pow(u, pp) - pos_pow(w_[i], pp)) / pp;
                       }
                       return s;
                   });
    double S = grad_w_ + 2.0 * q + g_phi;
    return energy_w_ + 0.5 * eps_ * eps_ * a_ * (2.0 * q + g_phi) + local +
           0.25 * eps_ * b_ * (S * S - grad_w_ * grad_w_);
}

Vector
BoxProblem::gradient(const Vector& phi) const
{
    Vector out(size());
    apply_L(phi, out);
    double S = grad_w_ + 2.0 * h3_ * vdot(g_, phi) + h3_ * vdot(phi, out);
    double alpha = eps_ * eps_ * a_ + eps_ * b_ * S;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double u = w_[i] + phi[i];
        out[i] = alpha * (g_[i] + out[i]) + v_[i] * u - pos_pow(u, p_);
    }
    boxes_.clear_boundary(out);
    return out;
}

Hessian
BoxProblem::hessian(const Vector& phi) const
{
    Hessian hess;
    hess.u.resize(size());
    apply_L(phi, hess.u);
    double S = grad_w_ + 2.0 * h3_ * vdot(g_, phi) + h3_ * vdot(phi, hess.u);
    for (std::size_t i = 0; i < size(); ++i) {
        hess.u[i] += g_[i];
    }
    hess.alpha = eps_ * eps_ * a_ + eps_ * b_ * S;
    hess.rank_coef = 2.0 * eps_ * b_;
    hess.diag.resize(size());
    for (std::size_t i = 0; i < size(); ++i) {
        hess.diag[i] = v_[i] - p_ * pos_pow(w_[i] + phi[i], p_ - 1.0);
    }
    return hess;
}

double
BoxProblem::eps_inner(const Vector& x, const Vector& y) const
{
    Vector by(size());
    apply_B(y, by);
    return h3_ * vdot(x, by);
}

double
BoxProblem::eps_norm(const Vector& x) const
{
    return std::sqrt(std::max(0.0, eps_inner(x, x)));
}

double
BoxProblem::precond_dual_norm(const Vector& G) const
{
    Vector x(size());
    apply_precond(G, x, eps_ * eps_ * a_);
    return std::sqrt(std::max(0.0, h3_ * vdot(G, x)));
}

double
BoxProblem::dual_norm(const Vector& G) const
{
    Vector x = solve_B(G);
    return std::sqrt(std::max(0.0, h3_ * vdot(G, x)));
}

std::vector<double>
BoxProblem::multipliers(const Vector& G) const
{
    Eigen::VectorXd t(static_cast<Eigen::Index>(z_.size()));
    for (std::size_t m = 0; m < z_.size(); ++m) {
        t(static_cast<Eigen::Index>(m)) = vdot(z_[m], G);
    }
    Eigen::VectorXd beta = gram_.solve(t);
    return {beta.data(), beta.data() + beta.size()};
}

Vector
BoxProblem::project_dual(const Vector& G) const
{
    Vector out = G;
    auto beta = multipliers(G);
    for (std::size_t m = 0; m < z_.size(); ++m) {
        simd::active_kernels().axpy(-beta[m], bz_[m].data(), out.data(), out.size());
    }
    return out;
}

void
BoxProblem::project(Vector& x) const
{
    Eigen::VectorXd t(static_cast<Eigen::Index>(z_.size()));
    for (std::size_t m = 0; m < z_.size(); ++m) {
        t(static_cast<Eigen::Index>(m)) = vdot(bz_[m], x);
    }
    Eigen::VectorXd coef = gram_.solve(t);
    for (std::size_t m = 0; m < z_.size(); ++m) {
        simd::active_kernels().axpy(-coef(static_cast<Eigen::Index>(m)), z_[m].data(), x.data(), x.size());
    }
}

std::vector<double>
BoxProblem::constraint_residuals(const Vector& phi) const
{
    std::vector<double> out;
    for (std::size_t m = 0; m < z_.size(); ++m) {
        out.push_back(h3_ * vdot(bz_[m], phi) / z_norm_(static_cast<Eigen::Index>(m)));
    }
    return out;
}

KrylovResult
BoxProblem::solve_constrained(const Hessian& hess, const Vector& rhs, Vector& s, std::vector<double>& beta,
                              double rtol, int max_iterations) const
{
    std::size_t n = size();
    std::size_t m = z_.size();
    const auto& kern = simd::active_kernels();
    std::size_t bs = boxes_.box_size();
    // Schur complement of the block preconditioner, C^T M^{-1} C. Constraint m lives on box m / 3 only, so
    // its block is block diagonal with 3 x 3 blocks.
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Vector minv_c(bs);
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t box = c / 3;
        helmholtz_->solve(bz_[c].data() + box * bs, minv_c.data(), hess.alpha, sigma_[box]);
        for (std::size_t r = 3 * box; r < 3 * box + 3; ++r) {
            schur(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                simd::dot(bz_[r].data() + box * bs, minv_c.data(), bs);
        }
    }
    schur = 0.5 * (schur + schur.transpose()).eval();
    Eigen::LDLT<Eigen::MatrixXd> schur_ldlt(schur);

    // The saddle vectors are [x (n entries); beta (m entries)]; both blocks are handled in place.
    auto op = [&](const Vector& x, Vector& y) {
        for (std::size_t b = 0; b < boxes_.count(); ++b) {
            kern.helmholtz(x.data() + b * bs, y.data() + b * bs, hess.diag.data() + b * bs, hess.alpha, boxes_.n(),
                           inv_h2_);
        }
        if (hess.rank_coef != 0.0) {
            kern.axpy(hess.rank_coef * h3_ * simd::dot(hess.u.data(), x.data(), n), hess.u.data(), y.data(), n);
        }
        for (std::size_t r = 0; r < m; ++r) {
            kern.axpy(x[n + r], bz_[r].data(), y.data(), n);
        }
        for (std::size_t r = 0; r < m; ++r) {
            y[n + r] = simd::dot(bz_[r].data(), x.data(), n);
        }
    };
    auto precond = [&](const Vector& x, Vector& y) {
        for (std::size_t b = 0; b < boxes_.count(); ++b) {
            helmholtz_->solve(x.data() + b * bs, y.data() + b * bs, hess.alpha, sigma_[b]);
        }
        Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(x.data() + n, static_cast<Eigen::Index>(m));
        Eigen::VectorXd sol = schur_ldlt.solve(t);
        for (std::size_t r = 0; r < m; ++r) {
            y[n + r] = sol(static_cast<Eigen::Index>(r));
        }
    };
    Vector b(n + m, 0.0);
    std::copy(rhs.begin(), rhs.end(), b.begin());
    Vector x(n + m, 0.0);
    auto res = minres(op, precond, b, x, rtol, max_iterations);
    s.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    beta.assign(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
    return res;
}

} // namespace kpeaks::reduction
