#include "kpeaks/energy/energy.hpp"

#include <algorithm>
#include <cmath>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/fit.hpp"
#include "kpeaks/core/format.hpp"
#include "kpeaks/core/parallel.hpp"
#include "kpeaks/radial/quadrature.hpp"
#include "kpeaks/simd/kernels.hpp"

namespace kpeaks::energy {

namespace {

double
pos_pow(double u, double q)
{
    return u > 0.0 ? std::pow(u, q) : 0.0;
}

double
int_grad_sq(const PeakSet& u, const fields::SphericalQuadrature& quad)
{
    return quad.integrate<1>([&](const Vec3& x) {
        FieldSample f = u.eval(x);
        return std::array<double, 1>{dot(f.grad, f.grad)};
    })[0];
}

} // namespace

SphericalSettings
settings_for(const PotentialModel& model)
{
    SphericalSettings s;
    s.max_panel = 0.5 * model.blend_width();
    return s;
}

double
assemble_energy(const EnergyParts& parts, double eps, const ProblemParams& params)
{
    double G = parts.grad_sq;
    return 0.5 * (eps * eps * params.a * G + parts.potential) + 0.25 * params.b * eps * G * G -
           parts.nonlinear / (params.p + 1.0);
}

EnergyParts
energy_parts(const PeakSet& u, const PotentialModel& model, const ProblemParams& params, const SphericalSettings& settings)
{
    EnergyParts out;
    if (u.size() == 0 || u.amplitude() == 0.0) {
        return out;
    }
    fields::SphericalQuadrature quad(u, settings);
    auto v = quad.integrate<3>([&](const Vec3& x) {
        FieldSample f = u.eval(x);
        return std::array<double, 3>{dot(f.grad, f.grad), eval_potential(model, x) * f.value * f.value,
                                     pos_pow(f.value, params.p + 1.0)};
    });
    out.grad_sq = v[0];
    out.potential = v[1];
    out.nonlinear = v[2];
    return out;
}

EnergyParts
energy_parts(const Field3D& u, const PotentialModel& model, const ProblemParams& params)
{
    EnergyParts out;
    double h = u.h();
    double h3 = h * h * h;
    double peak = u.max_abs();
    if (peak == 0.0) {
        return out;
    }
    if (u.boundary_max_abs() > 1e-10 * peak) {
        throw Error(ErrorCode::BoxTooSmall, "field does not decay at the box boundary");
    }
    std::vector<double> lap(u.size());
    simd::active_kernels().neg_laplacian(u.values().data(), lap.data(), u.n(), 1.0 / (h * h));
    out.grad_sq = h3 * simd::dot(u.values().data(), lap.data(), u.size());
    out.potential = h3 * deterministic_sum(u.size(), [&](std::size_t b, std::size_t e) {
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            s += eval_potential(model, u.node(i)) * u[i] * u[i];
        }
        return s;
    });
    out.nonlinear = h3 * deterministic_sum(u.size(), [&](std::size_t b, std::size_t e) {
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            s += pos_pow(u[i], params.p + 1.0);
        }
        return s;
    });
    return out;
}

double
energy_functional(const PeakSet& u, double eps, const PotentialModel& model, const ProblemParams& params)
{
    return assemble_energy(energy_parts(u, model, params, settings_for(model)), eps, params);
}

double
energy_functional(const Field3D& u, double eps, const PotentialModel& model, const ProblemParams& params)
{
    return assemble_energy(energy_parts(u, model, params), eps, params);
}

double
energy_functional(const FieldInput& u, Backend backend, double eps, const PotentialModel& model,
                  const ProblemParams& params)
{
    if (backend == Backend::spherical) {
        if (u.peaks == nullptr) {
            throw Error(ErrorCode::BackendMismatch, "spherical backend needs an analytic peak set");
        }
        return energy_functional(*u.peaks, eps, model, params);
    }
    if (u.grid == nullptr) {
        throw Error(ErrorCode::BackendMismatch, "box backend needs lattice values");
    }
    return energy_functional(*u.grid, eps, model, params);
}

ExpansionConstants
expansion_constants(const limit::LimitSystemSolution& limit, const ProblemParams& params)
{
    ExpansionConstants out;
    double p = params.p;
    double G = 0.0;
    double nonlinear = 0.0;
    for (std::size_t j = 0; j < limit.size(); ++j) {
        const auto& w = limit.w_profiles[j];
        nonlinear += radial::lp_norm_pow(w, p + 1.0);
        G += radial::grad_norm_sq(w);
        out.C2.push_back(0.5 * radial::lp_norm_pow(w, 2.0));
        if (limit.wells[j].local_shape == limit::LocalShape::hoelder_cusp) {
            out.theta = std::min(out.theta, limit.wells[j].hoelder_theta);
        }
    }
    out.C1 = (0.5 - 1.0 / (p + 1.0)) * nonlinear - 0.25 * params.b * G * G;
    return out;
}

namespace {

std::vector<Vec3>
displaced(const fields::AnsatzState& s, const std::vector<Vec3>& offsets)
{
    require(offsets.size() == s.limit->size(), "one offset per well is required");
    std::vector<Vec3> Y;
    for (std::size_t j = 0; j < offsets.size(); ++j) {
        Y.push_back(s.limit->wells[j].center + offsets[j]);
    }
    return Y;
}

double
energy_at(const fields::AnsatzState& tmpl, double eps, const std::vector<Vec3>& Y, const PotentialModel& model)
{
    fields::AnsatzState s = tmpl;
    s.eps = eps;
    s.Y = Y;
    return energy_functional(fields::assemble_ansatz(s), eps, model, tmpl.limit->params);
}

} // namespace

EnergyReport
expansion_scan(const fields::AnsatzState& state_template, const PotentialModel& model, const std::vector<double>& eps_list,
               const std::vector<Vec3>& offsets)
{
    require(eps_list.size() >= 4, "expansion scan needs at least four eps values");
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        require(eps_list[i] < eps_list[i - 1], "eps values must be decreasing");
    }
    const auto& limit = *state_template.limit;
    ExpansionConstants k = expansion_constants(limit, limit.params);
    std::vector<Vec3> Y = displaced(state_template, offsets);
    double linear = 0.0;
    for (std::size_t j = 0; j < Y.size(); ++j) {
        linear += k.C2[j] * (eval_potential(model, Y[j]) - limit.wells[j].value);
    }
    EnergyReport out;
    out.eps = eps_list;
    for (double e : eps_list) {
        double e3 = e * e * e;
        double I = energy_at(state_template, e, Y, model);
        double pred = (k.C1 + linear) * e3;
        out.measured.push_back(I);
        out.predicted.push_back(pred);
        out.residual.push_back(I - pred);
    }
    out.fitted_order = fit_loglog_slope(out.eps, out.residual);
    return out;
}

LinearTermReport
linear_term_scan(const fields::AnsatzState& state_template, const PotentialModel& model,
                 const std::vector<double>& eps_list, const std::vector<Vec3>& offsets)
{
    const auto& limit = *state_template.limit;
    ExpansionConstants k = expansion_constants(limit, limit.params);
    std::vector<Vec3> Y = displaced(state_template, offsets);
    std::vector<Vec3> A;
    LinearTermReport out;
    for (std::size_t j = 0; j < Y.size(); ++j) {
        A.push_back(limit.wells[j].center);
        out.predicted += k.C2[j] * (eval_potential(model, Y[j]) - limit.wells[j].value);
    }
    for (double e : eps_list) {
        double d = (energy_at(state_template, e, Y, model) - energy_at(state_template, e, A, model)) / (e * e * e);
        out.eps.push_back(e);
        out.measured.push_back(d);
        out.relative_error.push_back(std::abs(d - out.predicted) / std::abs(out.predicted));
    }
    return out;
}

void
write_energy_csv(const EnergyReport& r, const std::filesystem::path& path)
{
    auto out = open_output(path);
    out << "eps,I_measured,I_predicted,residual,fitted_order\n";
    for (std::size_t i = 0; i < r.eps.size(); ++i) {
        out << fmt17(r.eps[i]) << ',' << fmt17(r.measured[i]) << ',' << fmt17(r.predicted[i]) << ','
            << fmt17(r.residual[i]) << ",\n";
    }
    out << ",,,," << fmt17(r.fitted_order) << '\n';
}

double
l_eps(const PeakSet& W, const TestField& phi, double eps, const PotentialModel& model, const ProblemParams& params)
{
    fields::SphericalQuadrature quad(W, settings_for(model));
    double G = int_grad_sq(W, quad);
    double coef = eps * eps * params.a + eps * params.b * G;
    return quad.integrate<1>([&](const Vec3& x) {
        FieldSample w = W.eval(x);
        FieldSample f = phi(x);
        double v = coef * dot(w.grad, f.grad) + eval_potential(model, x) * w.value * f.value -
                   pos_pow(w.value, params.p) * f.value;
        return std::array<double, 1>{v};
    })[0];
}

double
eps_norm_sq(const PeakSet& W, const TestField& phi, double eps, const PotentialModel& model, const ProblemParams& params)
{
    fields::SphericalQuadrature quad(W, settings_for(model));
    return quad.integrate<1>([&](const Vec3& x) {
        FieldSample f = phi(x);
        return std::array<double, 1>{eps * eps * params.a * dot(f.grad, f.grad) + eval_potential(model, x) * f.value * f.value};
    })[0];
}

PohozaevReport
pohozaev_residual(const PeakSet& u, double eps, const PotentialModel& model, const ProblemParams& params,
                  const Vec3& center, double radius, const SphericalSettings& settings)
{
    PohozaevReport out;
    fields::SphericalQuadrature quad(u, settings);
    double G = int_grad_sq(u, quad);
    out.eps1_sq = eps * eps * params.a + eps * params.b * G;
    double len = INFINITY;
    for (std::size_t i = 0; i < u.size(); ++i) {
        len = std::min(len, u.decay_length(i));
    }
    double panel = std::min(settings.panel_width * len, settings.max_panel);
    out.lhs = fields::integrate_ball<3>(center, radius, panel, settings, [&](const Vec3& x) {
        Vec3 g = grad_potential(model, x);
        double v = u.value(x);
        return std::array<double, 3>{g[0] * v * v, g[1] * v * v, g[2] * v * v};
    });
    double q = params.p + 1.0;
    out.rhs = fields::integrate_sphere<3>(center, radius, settings, [&](const Vec3& x, const Vec3& nu) {
        FieldSample f = u.eval(x);
        double g2 = dot(f.grad, f.grad);
        double dn = dot(f.grad, nu);
        double scalar = eval_potential(model, x) * f.value * f.value - 2.0 / q * pos_pow(f.value, q);
        std::array<double, 3> r{};
        for (int j = 0; j < 3; ++j) {
            r[j] = out.eps1_sq * (g2 * nu[j] - 2.0 * dn * f.grad[j]) + scalar * nu[j];
        }
        return r;
    });
    for (int j = 0; j < 3; ++j) {
        out.residual = std::max(out.residual, std::abs(out.lhs[j] - out.rhs[j]));
    }
    return out;
}

std::vector<double>
defect_projections(const PeakSet& u, double eps, const PotentialModel& model, const ProblemParams& params)
{
    fields::SphericalQuadrature quad(u, settings_for(model));
    double G = int_grad_sq(u, quad);
    double coef = eps * eps * params.a + eps * params.b * G;
    std::size_t k = u.size();
    std::vector<double> out(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        auto v = quad.integrate<1>([&](const Vec3& x) {
            FieldSample f = u.eval(x);
            double D = -coef * f.laplacian + eval_potential(model, x) * f.value - pos_pow(f.value, params.p);
            return std::array<double, 1>{D * u.eval_peak(j, x).value};
        });
        out[j] = v[0] / (eps * eps * eps);
    }
    return out;
}

DefectScan
nonexistence_defect(const ProblemParams& params, const PotentialModel& model, const std::vector<double>& eps_list)
{
    require(model.wells.size() >= 2, "the nonexistence defect needs at least two wells");
    auto single = limit::solve_single_kirchhoff_all(params, model.wells);
    auto system = limit::build_limit_system(params, model.wells);
    std::vector<Vec3> A;
    std::vector<radial::RadialProfile> U;
    DefectScan out;
    for (std::size_t j = 0; j < model.wells.size(); ++j) {
        A.push_back(model.wells[j].center);
        U.push_back(single.wells[j].profile);
        out.oracle.push_back(params.b * single.K[j] * radial::grad_norm_sq(single.wells[j].profile));
    }
    for (double e : eps_list) {
        out.eps.push_back(e);
        out.naive_ratio.push_back(defect_projections(PeakSet(e, A, U), e, model, params));
        out.system_ratio.push_back(defect_projections(PeakSet(e, A, system.w_profiles), e, model, params));
    }
    return out;
}

void
write_defect_csv(const DefectScan& s, const std::filesystem::path& path)
{
    auto out = open_output(path);
    out << "eps";
    std::size_t k = s.oracle.size();
    for (std::size_t j = 0; j < k; ++j) {
        out << ",naive_ratio_" << j + 1;
    }
    for (std::size_t j = 0; j < k; ++j) {
        out << ",system_ratio_" << j + 1;
    }
    out << '\n';
    for (std::size_t i = 0; i < s.eps.size(); ++i) {
        out << fmt17(s.eps[i]);
        for (double v : s.naive_ratio[i]) {
            out << ',' << fmt17(v);
        }
        for (double v : s.system_ratio[i]) {
            out << ',' << fmt17(v);
        }
        out << '\n';
    }
}

} // namespace kpeaks::energy
