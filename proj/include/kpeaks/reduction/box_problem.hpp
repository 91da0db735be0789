#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "kpeaks/core/krylov.hpp"
#include "kpeaks/fields/ansatz.hpp"
#include "kpeaks/fields/peak_boxes.hpp"
#include "kpeaks/fields/potential.hpp"

namespace kpeaks::reduction {

/// Lattice resolution of the corrector boxes.
struct GridSettings
{
    int n = 48;
    /// Lattice spacings across the peak width eps sqrt(c); must be at least 8.
    double nodes_per_width = 8.0;
    /// Fixed box half-width in x units; 0 derives it from n and nodes_per_width.
    double half_width = 0.0;
};

/// Second variation at a corrector phi, in density form:
///   H x = alpha (-Delta_h) x + diag x + rank_coef h^3 (u . x) u.
struct Hessian
{
    double alpha = 0.0;
    Vector diag;
    Vector u;
    double rank_coef = 0.0;
};

/// The corrector problem J(phi) = I_eps(W_{eps,Y} + phi) for phi on per-peak boxes with zero boundary values.
///
/// W stays analytic: I_eps(W) and int |grad W|^2 come from the spherical quadrature, and the lattice carries
/// only the phi-dependent part. Gradients are densities, so the first variation is h^3 G . psi; the
/// eps-inner product is <x, y>_eps = h^3 x . B y with B = eps^2 a (-Delta_h) + V.
class BoxProblem
{
  public:
    /// Throws Error(UnresolvedPeak) when fewer than 8 spacings cover the peak width eps sqrt(c).
    BoxProblem(const fields::AnsatzState& state, const fields::PotentialModel& model, const GridSettings& grid);

    const fields::PeakBoxes& boxes() const
    {
        return boxes_;
    }
    const fields::PeakSet& ansatz() const
    {
        return ansatz_;
    }
    std::size_t size() const
    {
        return boxes_.size();
    }
    /// 3k.
    std::size_t constraint_count() const
    {
        return z_.size();
    }
    double eps() const
    {
        return eps_;
    }
    double h3() const
    {
        return h3_;
    }
    double ansatz_energy() const
    {
        return energy_w_;
    }
    double ansatz_grad_sq() const
    {
        return grad_w_;
    }
    /// W sampled on the lattice (boundary nodes included).
    const Vector& sampled_ansatz() const
    {
        return w_;
    }
    const Vector& sampled_potential() const
    {
        return v_;
    }
    /// -Delta W sampled analytically (zero on boundaries).
    const Vector& sampled_minus_laplacian() const
    {
        return g_;
    }
    /// a and p of the equation.
    double a() const
    {
        return a_;
    }
    double p() const
    {
        return p_;
    }
    /// z_m = d/dy_j^i of w^i((x - y^i) / eps) on box i, zero elsewhere and on boundaries; m = 3 i + j.
    const std::vector<Vector>& constraints() const
    {
        return z_;
    }

    void apply_L(const Vector& x, Vector& y) const;
    void apply_B(const Vector& x, Vector& y) const;
    void apply_hessian(const Hessian& hess, const Vector& x, Vector& y) const;

    /// Per box (alpha (-Delta_h) + V(y^i))^{-1} by sine transforms.
    void apply_precond(const Vector& r, Vector& y, double alpha) const;

    /// B^{-1} rhs by preconditioned CG.
    Vector solve_B(const Vector& rhs, double rtol = 1e-12) const;

    double energy(const Vector& phi) const;
    /// -(eps^2 a + eps b G_u) Delta u + V u - u_+^p with u = W + phi; zero on boundaries.
    Vector gradient(const Vector& phi) const;
    Hessian hessian(const Vector& phi) const;

    double eps_inner(const Vector& x, const Vector& y) const;
    double eps_norm(const Vector& x) const;

    /// sup_psi h^3 G . psi / ||psi||_eps = sqrt(h^3 G . B^{-1} G).
    double dual_norm(const Vector& G) const;

    /// sqrt(h^3 G . M^{-1} G) with M the sine-transform preconditioner of B; equivalent to dual_norm
    /// up to the variation of V across each box.
    double precond_dual_norm(const Vector& G) const;

    /// beta minimizing the dual norm of G - B Z beta: (Z^T B Z)^{-1} Z^T G.
    std::vector<double> multipliers(const Vector& G) const;

    /// G - B Z beta(G); annihilates every z_m.
    Vector project_dual(const Vector& G) const;

    /// x - Z (Z^T B Z)^{-1} Z^T B x: the eps-orthogonal projection onto E_{eps,Y}.
    void project(Vector& x) const;

    /// <phi, z_m>_eps / ||z_m||_eps for every m.
    std::vector<double> constraint_residuals(const Vector& phi) const;

    /// Solves [H C; C^T 0] [s; beta] = [rhs; 0] with C = B Z by preconditioned MINRES; s is zeroed first.
    KrylovResult solve_constrained(const Hessian& hess, const Vector& rhs, Vector& s, std::vector<double>& beta,
                                   double rtol, int max_iterations) const;

  private:
    const fields::PotentialModel* model_;
    fields::PeakSet ansatz_;
    fields::PeakBoxes boxes_;
    std::shared_ptr<fields::DirichletHelmholtz> helmholtz_;
    double eps_;
    double a_, b_, p_;
    double h3_;
    double inv_h2_;
    double energy_w_;
    double grad_w_;
    std::vector<double> sigma_;
    Vector w_, v_, g_;
    std::vector<Vector> z_;
    std::vector<Vector> bz_;
    /// Z^T B Z (Euclidean, without h^3).
    Eigen::LDLT<Eigen::MatrixXd> gram_;
    Eigen::VectorXd z_norm_;
};

} // namespace kpeaks::reduction
