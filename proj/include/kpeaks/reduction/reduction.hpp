#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "kpeaks/fields/ansatz.hpp"
#include "kpeaks/fields/potential.hpp"
#include "kpeaks/reduction/box_problem.hpp"

namespace kpeaks::reduction {

struct ReductionSettings
{
    GridSettings grid;
    /// Bound on the projected first variation, ||G_E||_* / eps^(3/2).
    double newton_tol = 1e-8;
    int max_newton = 20;
    /// Exponent loss in the corrector bound ||phi||_eps <= eps^(3/2 + theta - tau); reporting only.
    double tau = 0.1;
    /// Simplex diameter (x units) at which the Y-search stops.
    double simplex_tol = 1e-3;
    int max_simplex_evaluations = 400;
    int max_linear_iterations = 400;
    /// Newton tolerance of the landscape evaluations inside the simplex search. j is stationary in phi, so
    /// its error is quadratic in this tolerance; the argmin is re-solved at newton_tol.
    double landscape_tol = 1e-5;
    /// Perturbed simplex starts (besides Y = A), offset by 0.3 delta in seeded random directions.
    int perturbed_starts = 2;
    std::uint64_t seed = 20240611;
    /// Newton steps on the multipliers beta(Y) = 0 after the simplex search.
    int max_polish = 4;

    /// Throws Error(InvalidArgument) unless newton_tol > 0 and 0 < tau < theta / 2.
    void validate(double theta) const;
};

/// Corrector phi_{eps,Y} in E_{eps,Y} with solver diagnostics.
struct PhiSolution
{
    Vector phi;
    double norm_eps = 0.0;
    /// <phi, z_m>_eps / ||z_m||_eps.
    std::vector<double> projection_residuals;
    int newton_iterations = 0;
    int linear_iterations = 0;
    /// Preconditioned projected residual per Newton iterate, final entry last.
    std::vector<double> residual_history;
    /// ||G_E||_* / eps^(3/2) (preconditioned dual norm when diagnostics are off).
    double projected_residual = 0.0;
    /// ||G||_* / eps^(3/2) without the projection; zero when diagnostics are off.
    double unprojected_residual = 0.0;
    /// Multipliers of the final first variation along B z_m.
    std::vector<double> multipliers;
    /// J(Y, phi) = I_eps(W + phi).
    double energy = 0.0;
};

struct PhiOptions
{
    /// Starting corrector (projected onto E_{eps,Y} first); zero when absent.
    const Vector* initial = nullptr;
    /// Overrides settings.newton_tol when positive.
    double tol = 0.0;
    /// Confirms convergence and reports residuals in the exact dual norm (CG solves with B).
    /// Without it the stopping test uses the preconditioned dual norm only.
    bool diagnostics = true;
};

/// Newton iteration on E_{eps,Y}; the line search backtracks on the preconditioned projected residual.
///
/// Throws Error(NewtonDiverged) with the last residual when the line search or the iteration budget
/// fails, Error(ConstraintDrift) when an iterate leaves E_{eps,Y} by more than 1e-10 ||phi||_eps.
PhiSolution solve_phi(const BoxProblem& problem, const ReductionSettings& settings, const PhiOptions& options = {});

PhiSolution solve_phi(const fields::AnsatzState& state, const fields::PotentialModel& model,
                      const ReductionSettings& settings);

/// One evaluation of the reduced energy.
struct LandscapePoint
{
    std::vector<Vec3> Y;
    double j = 0.0;
    /// ||phi||_eps.
    double phi_norm = 0.0;
    int newton_iterations = 0;
};

/// j_eps(Y) = J_eps(Y, phi_{eps,Y}) with warm starts: consecutive calls reuse the previous corrector, which
/// lives on boxes that move with Y.
class ReducedEnergy
{
  public:
    ReducedEnergy(const fields::PotentialModel& model, std::shared_ptr<const limit::LimitSystemSolution> limit,
                  double eps, const ReductionSettings& settings);

    /// Landscape evaluation at settings.landscape_tol; recorded in points().
    double operator()(const std::vector<Vec3>& Y);

    /// Corrector at settings.newton_tol with exact dual-norm diagnostics; recorded in points().
    PhiSolution solve(const std::vector<Vec3>& Y);

    /// The box problem of the last evaluation.
    const BoxProblem& last_problem() const;

    const std::vector<LandscapePoint>& points() const
    {
        return points_;
    }
    double eps() const
    {
        return eps_;
    }
    const fields::PotentialModel& model() const
    {
        return *model_;
    }

  private:
    PhiSolution evaluate(const std::vector<Vec3>& Y, const PhiOptions& options);

    const fields::PotentialModel* model_;
    std::shared_ptr<const limit::LimitSystemSolution> limit_;
    double eps_;
    ReductionSettings settings_;
    std::unique_ptr<BoxProblem> problem_;
    Vector warm_;
    std::vector<LandscapePoint> points_;
};

/// j_eps(Y) solved at newton_tol.
double reduced_energy(const std::vector<Vec3>& Y, double eps, const fields::PotentialModel& model,
                      std::shared_ptr<const limit::LimitSystemSolution> limit, const ReductionSettings& settings);

/// Simplex search result over D_delta.
struct ReducedLandscape
{
    double eps = 0.0;
    fields::PeakDomain domain;
    std::vector<LandscapePoint> points;
    std::vector<Vec3> argmin;
    double j_min = 0.0;
    /// |y_eps^i - a_i|.
    std::vector<double> distances;
    /// delta - max_i |y_eps^i - a_i|.
    double margin = 0.0;
    /// margin >= 0.05 delta.
    bool interior = false;
    /// Best value per simplex start (start 0 is Y = A).
    std::vector<double> start_minima;
    /// False when a start ran out of evaluations before reaching simplex_tol.
    bool simplex_converged = true;
    /// Corrector at the argmin (newton_tol, exact residuals); polished to beta(Y) = 0 when interior.
    PhiSolution phi;
    int polish_steps = 0;
};

/// Multi-start simplex search without the boundary verdict; the corrector at the argmin is always returned.
ReducedLandscape explore_j(ReducedEnergy& j, const fields::PeakDomain& domain, const ReductionSettings& settings);

/// explore_j, then Error(BoundaryMinimum) when the argmin lies within 0.05 delta of the boundary of D_delta.
ReducedLandscape minimize_j(ReducedEnergy& j, const fields::PeakDomain& domain, const ReductionSettings& settings);

/// Columns y<i>_x, y<i>_y, y<i>_z per well, j_eps, phi_norm, newton_iters.
void write_landscape_csv(const ReducedLandscape& landscape, const std::filesystem::path& path);

/// Thresholds of the multi-peak clauses.
struct MultipeakSettings
{
    /// tau = tau_fraction * max u.
    double tau_fraction = 0.01;
    /// Radius of the exclusion balls in units of eps.
    double R = 10.0;
    /// Bound on int (eps^2 a |grad u|^2 + u^2) / eps^3; non-positive selects the default.
    double C_energy = 0.0;
    /// Clause (i) requires each maximum within this distance of its well.
    double max_distance = 0.05;
    /// Local maxima below this fraction of max u are ignored (tail noise).
    double maxima_floor = 0.01;
    /// Lattice points per axis of the global scan outside the boxes.
    int scan_n = 81;
};

struct MultipeakReport
{
    std::vector<Vec3> maxima;
    std::vector<double> maxima_values;
    /// Distance from a_i to the nearest maximum.
    std::vector<double> distances;
    bool clause_i = false;
    double tau = 0.0;
    double outside_sup = 0.0;
    bool clause_ii = false;
    /// int (eps^2 a |grad u|^2 + u^2) / eps^3.
    double energy_ratio = 0.0;
    double C_energy = 0.0;
    bool clause_iii = false;
    bool passed = false;
};

/// 10 (a int |grad w^1|^2 + int (w^1)^2): ten times the eps-independent ratio of a single peak.
double default_energy_bound(const limit::LimitSystemSolution& limit, const limit::ProblemParams& params);

/// Clauses (i)-(iii) for u = W_{eps,Y} + phi on the boxes of \p problem (phi empty means u = W).
MultipeakReport multipeak_diagnostics(const BoxProblem& problem, const Vector& phi, const std::vector<Vec3>& wells,
                                      const MultipeakSettings& settings);

void write_diagnostics_json(const MultipeakReport& report, const ReducedLandscape* landscape,
                            const std::filesystem::path& path);

/// |grad V| at the peak limits extrapolated linearly in eps from the two smallest eps.
struct CriticalPointReport
{
    std::vector<double> eps;
    /// [eps index][well]
    std::vector<std::vector<Vec3>> peaks;
    std::vector<Vec3> limits;
    std::vector<double> grad_norms;
    double tolerance = 1e-2;
    bool passed = false;
};

/// Throws Error(GradAtCusp) for cusp wells and Error(InvalidArgument) for fewer than two landscapes.
CriticalPointReport critical_point_check(const std::vector<ReducedLandscape>& landscapes,
                                         const fields::PotentialModel& model, double tolerance = 1e-2);

/// Remainder of the second-order expansion of J(Y, .) at phi = 0 against its predicted shape.
struct RemainderSample
{
    double eps = 0.0;
    double phi_norm = 0.0;
    double remainder = 0.0;
    /// eps^(-3(p-1)/2) ||phi||^(p+1) + eps^(-3/2) ||phi||^3.
    double shape = 0.0;
    double ratio = 0.0;
};

/// R(phi) = J(phi) - J(0) - l(phi) - 1/2 <Lambda phi, phi> at the computed corrector.
RemainderSample remainder_sample(const BoxProblem& problem, const Vector& phi);

} // namespace kpeaks::reduction
