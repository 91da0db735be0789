#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "kpeaks/fields/ansatz.hpp"
#include "kpeaks/fields/potential.hpp"
#include "kpeaks/limit/kirchhoff_limit.hpp"
#include "kpeaks/reduction/box_problem.hpp"

namespace kpeaks::spectral {

struct RadialOperatorOptions
{
    /// Polynomial degree per spectral element.
    int order = 12;
    /// Element width in units of the decay length sqrt(c / V(a_i)).
    double element_width = 0.5;
    /// Truncation radius where w^i falls below this fraction of its peak (Dirichlet there).
    double truncation = 1e-13;
    /// Include -2b (int grad w^i . grad phi) Delta w^i.
    bool include_nonlocal = true;
};

/// Angular mode ell of L_+^i in the variable chi = r phi on Gauss-Lobatto-Legendre elements:
///   (chi, eta) -> int c chi' eta' + (c ell (ell + 1) / r^2 + V(a_i) - p (w^i)^(p-1)) chi eta dr
///                 + [ell = 0] 8 pi b (int r g chi dr) (int r g eta dr),  g = -Delta w^i.
/// The lumped mass int chi eta dr equals int phi psi r^2 dr, so the operator M^{-1} K is symmetric in
/// the r^2-weighted inner product. Nodes exclude r = 0 and the truncation radius.
struct RadialOperatorMatrix
{
    int ell = 0;
    std::size_t well = 0;
    Eigen::VectorXd r;
    /// Diagonal of the mass matrix.
    Eigen::VectorXd mass;
    /// Symmetric stiffness including the potential and nonlocal terms.
    Eigen::MatrixXd stiffness;

    Eigen::Index size() const
    {
        return r.size();
    }

    /// Nodal values of L chi, i.e. M^{-1} K chi.
    Eigen::VectorXd apply(const Eigen::VectorXd& chi) const;

    /// sum_k mass_k x_k y_k.
    double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    double norm(const Eigen::VectorXd& x) const;
};

RadialOperatorMatrix build_lplus_radial(const limit::LimitSystemSolution& limit, std::size_t well, int ell,
                                        const RadialOperatorOptions& options = {});

/// Eigenpairs of M^{-1} K ordered by increasing |eigenvalue|; vectors are mass-normalized chi values.
struct EigenPairs
{
    std::vector<double> values;
    std::vector<Eigen::VectorXd> vectors;
    /// Number of negative eigenvalues in the whole spectrum.
    int negative_count = 0;
};

/// Throws Error(NoConvergence) when the symmetric eigensolver fails.
EigenPairs smallest_eigenpairs(const RadialOperatorMatrix& matrix, int count);

/// Spectra of L_+^i over several angular modes and the kernel diagnostics.
struct ModeSpectrum
{
    int ell = 0;
    EigenPairs pairs;
    /// Entries of pairs.values below kernel_tol * scale in magnitude.
    int kernel_count = 0;
};

struct NondegeneracyReport
{
    std::size_t well = 0;
    std::vector<ModeSpectrum> modes;
    /// |second smallest-magnitude eigenvalue| at ell = 1.
    double scale = 0.0;
    double kernel_tol = 1e-6;
    /// Cosine between the ell = 1 near-kernel vector and r (w^i)'.
    double kernel_cosine = 0.0;
    /// Smallest |eigenvalue| at ell = 0 over scale.
    double radial_gap = 0.0;
    /// ||L (r w')|| / ||r w'|| at ell = 1.
    double translation_residual = 0.0;
    /// Near-kernel only at ell = 1 with multiplicity 1, cosine >= 0.999 and radial gap >= 0.01.
    bool passed = false;
};

NondegeneracyReport nondegeneracy_report(const limit::LimitSystemSolution& limit, std::size_t well,
                                         const std::vector<int>& ells = {0, 1, 2, 3}, int count = 6,
                                         const RadialOperatorOptions& options = {});

/// Columns ell, eigenvalue_rank, eigenvalue, kernel_flag.
void write_spectrum_csv(const std::vector<NondegeneracyReport>& reports, const std::filesystem::path& path);

/// Extremal spectrum of the second variation relative to the eps-inner product on the per-peak boxes.
///
/// E_{eps,Y} is the eps-orthogonal complement of the sampled translation vectors. rho_estimate is the
/// discrete constant in ||Lambda phi||_* >= rho ||phi||_eps on E (dual norm of the unprojected image),
/// from the bottom of (B^{-1} H)^2 restricted to E; the Rayleigh bounds come from B^{-1} H on E.
struct CoercivityReport
{
    double eps = 0.0;
    std::vector<Vec3> Y;
    int n = 0;
    double h = 0.0;
    double half_width = 0.0;
    /// Smallest ||Lambda phi||_* / ||phi||_eps over E (dual norm of the unprojected image).
    double rho_estimate = 0.0;
    /// Smallest Rayleigh quotient <Lambda phi, phi> / ||phi||_eps^2 on E (negative: the ansatz direction).
    double smallest = 0.0;
    /// Largest Rayleigh quotient on E.
    double upper_C = 0.0;
    /// rho over the whole space: near zero because of the translation near-kernel.
    double full_min_abs = 0.0;
    int lanczos_steps = 0;
};

struct LanczosSettings
{
    int max_steps = 200;
    int min_steps = 20;
    int check_every = 5;
    /// The bottom Ritz pair counts as converged when its residual is below tol * max |Ritz value|.
    double tol = 1e-6;
    std::uint64_t seed = 20240611;
};

/// Throws Error(UnresolvedPeak) when the lattice leaves fewer than 8 nodes across eps sqrt(c),
/// Error(NoConvergence) when the Lanczos budget does not resolve the eigenvalues around zero.
CoercivityReport coercivity_check(const fields::AnsatzState& state, const fields::PotentialModel& model,
                                  const reduction::GridSettings& grid, const LanczosSettings& settings = {});

/// Columns eps, n, rho_estimate, upper_C.
void write_coercivity_csv(const std::vector<CoercivityReport>& reports, const std::filesystem::path& path);

} // namespace kpeaks::spectral
