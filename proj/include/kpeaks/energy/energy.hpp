#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

#include "kpeaks/fields/ansatz.hpp"
#include "kpeaks/fields/field3d.hpp"
#include "kpeaks/fields/potential.hpp"
#include "kpeaks/fields/spherical.hpp"
#include "kpeaks/limit/kirchhoff_limit.hpp"

namespace kpeaks::energy {

using fields::Backend;
using fields::Field3D;
using fields::FieldSample;
using fields::PeakSet;
using fields::PotentialModel;
using fields::SphericalSettings;
using limit::ProblemParams;

/// Spherical settings whose radial panels also resolve the blend shells of \p model.
SphericalSettings settings_for(const PotentialModel& model);

/// The integrals entering I_eps.
struct EnergyParts
{
    /// int |grad u|^2
    double grad_sq = 0.0;
    /// int V u^2
    double potential = 0.0;
    /// int u_+^(p+1)
    double nonlinear = 0.0;
};

/// I_eps = 1/2 (eps^2 a G + int V u^2) + (b eps / 4) G^2 - int u_+^(p+1) / (p+1), G = int |grad u|^2.
double assemble_energy(const EnergyParts& parts, double eps, const ProblemParams& params);

EnergyParts energy_parts(const PeakSet& u, const PotentialModel& model, const ProblemParams& params,
                         const SphericalSettings& settings);

/// Lattice version: G = h^3 sum u (-Delta_h u) with Dirichlet boundary, plain node sums otherwise.
EnergyParts energy_parts(const Field3D& u, const PotentialModel& model, const ProblemParams& params);

double energy_functional(const PeakSet& u, double eps, const PotentialModel& model, const ProblemParams& params);
double energy_functional(const Field3D& u, double eps, const PotentialModel& model, const ProblemParams& params);

/// Either representation of a candidate field.
struct FieldInput
{
    const PeakSet* peaks = nullptr;
    const Field3D* grid = nullptr;
};

/// Dispatches on \p backend; throws Error(BackendMismatch) when \p u lacks the required data.
double energy_functional(const FieldInput& u, Backend backend, double eps, const PotentialModel& model,
                         const ProblemParams& params);

/// C1 = (1/2 - 1/(p+1)) sum_j int (w^j)^(p+1) - (b/4) (sum_i int |grad w^i|^2)^2, C2_j = 1/2 int (w^j)^2.
struct ExpansionConstants
{
    double C1 = 0.0;
    std::vector<double> C2;
    /// Hoelder exponent of the least regular well (1 for smooth wells).
    double theta = 1.0;
};

ExpansionConstants expansion_constants(const limit::LimitSystemSolution& limit, const ProblemParams& params);

/// I_eps(W_{eps,Y}) against C1 eps^3 + sum_j C2_j (V(y^j) - V(a_j)) eps^3.
struct EnergyReport
{
    std::vector<double> eps;
    std::vector<double> measured;
    std::vector<double> predicted;
    std::vector<double> residual;
    /// Slope of log|residual| against log eps.
    double fitted_order = 0.0;
};

/// Scan with Y = A + offsets (offsets in x units, one per well); eps_list must be decreasing.
EnergyReport expansion_scan(const fields::AnsatzState& state_template, const PotentialModel& model,
                            const std::vector<double>& eps_list, const std::vector<Vec3>& offsets);

/// Linear-term check: (I(W_Y) - I(W_A)) / eps^3 against sum_j C2_j (V(y^j) - V(a_j)).
struct LinearTermReport
{
    std::vector<double> eps;
    std::vector<double> measured;
    double predicted = 0.0;
    std::vector<double> relative_error;
};

LinearTermReport linear_term_scan(const fields::AnsatzState& state_template, const PotentialModel& model,
                                  const std::vector<double>& eps_list, const std::vector<Vec3>& offsets);

void write_energy_csv(const EnergyReport& report, const std::filesystem::path& path);

/// Test function with value and gradient.
using TestField = std::function<FieldSample(const Vec3&)>;

/// l_eps(phi) = <W, phi>_eps + eps b (int |grad W|^2) int grad W . grad phi - int W_+^p phi.
double l_eps(const PeakSet& W, const TestField& phi, double eps, const PotentialModel& model,
             const ProblemParams& params);

/// ||phi||_eps^2 = int (eps^2 a |grad phi|^2 + V phi^2), integrated on the quadrature of \p W.
double eps_norm_sq(const PeakSet& W, const TestField& phi, double eps, const PotentialModel& model,
                   const ProblemParams& params);

/// Both sides of the local Pohozaev identity on B_R(center), for j = 1, 2, 3:
///   int_B dV/dx_j u^2 = eps1^2 int_dB (|grad u|^2 nu_j - 2 du/dnu du/dx_j)
///                       + int_dB V u^2 nu_j - 2/(p+1) int_dB u^(p+1) nu_j,
/// with eps1^2 = eps^2 a + eps b int_R^3 |grad u|^2 taken from u itself.
struct PohozaevReport
{
    std::array<double, 3> lhs{};
    std::array<double, 3> rhs{};
    double eps1_sq = 0.0;
    /// max_j |lhs_j - rhs_j|.
    double residual = 0.0;
};

PohozaevReport pohozaev_residual(const PeakSet& u, double eps, const PotentialModel& model, const ProblemParams& params,
                                 const Vec3& center, double radius, const SphericalSettings& settings);

/// Projection of the Kirchhoff defect of u onto its peak j, divided by eps^3:
///   int (-(eps^2 a + eps b int|grad u|^2) Delta u + V u - u_+^p) u_j / eps^3.
std::vector<double> defect_projections(const PeakSet& u, double eps, const PotentialModel& model,
                                       const ProblemParams& params);

/// Naive ansatz (isolated-well Kirchhoff profiles U^(i)) against the system ansatz W_{eps,A}.
struct DefectScan
{
    std::vector<double> eps;
    /// [eps index][well]
    std::vector<std::vector<double>> naive_ratio;
    std::vector<std::vector<double>> system_ratio;
    /// b K_j int |grad U^(j)|^2 by radial quadrature.
    std::vector<double> oracle;
};

DefectScan nonexistence_defect(const ProblemParams& params, const PotentialModel& model, const std::vector<double>& eps_list);

void write_defect_csv(const DefectScan& scan, const std::filesystem::path& path);

} // namespace kpeaks::energy
