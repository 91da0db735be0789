#include "kpeaks/cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "kpeaks/core/format.hpp"
#include "kpeaks/core/parallel.hpp"
#include "kpeaks/energy/energy.hpp"
#include "kpeaks/radial/io.hpp"
#include "kpeaks/radial/quadrature.hpp"
#include "kpeaks/radial/shooting.hpp"
#include "kpeaks/spectral/spectral.hpp"

namespace kpeaks::cli {

namespace {

using nlohmann::ordered_json;
using LimitPtr = std::shared_ptr<const limit::LimitSystemSolution>;

ordered_json
num(double x)
{
    return std::isfinite(x) ? ordered_json::parse(fmt17(x)) : ordered_json(nullptr);
}

ordered_json
vec(const Vec3& v)
{
    return ordered_json::array({num(v[0]), num(v[1]), num(v[2])});
}

std::string
label(double eps)
{
    std::ostringstream s;
    s << eps;
    return s.str();
}

std::string
well_name(std::size_t i)
{
    return "well" + std::to_string(i);
}

std::vector<Vec3>
centers(const fields::PotentialModel& model)
{
    std::vector<Vec3> A;
    for (const auto& w : model.wells) {
        A.push_back(w.center);
    }
    return A;
}

radial::ShootingOptions
shooting_options(const RunConfig& cfg)
{
    radial::ShootingOptions opt;
    opt.tol = cfg.tol("shooting_tol");
    return opt;
}

LimitPtr
limit_system(const RunConfig& cfg)
{
    return std::make_shared<const limit::LimitSystemSolution>(
        limit::build_limit_system(cfg.problem, cfg.model.wells, cfg.tol("limit_consistency"), shooting_options(cfg)));
}

fields::AnsatzState
state_at(const LimitPtr& lim, double eps, std::vector<Vec3> Y)
{
    fields::AnsatzState s;
    s.eps = eps;
    s.limit = lim;
    s.Y = std::move(Y);
    return s;
}

void
groundstate(const RunConfig& cfg, RunManifest& m, std::ostream& log)
{
    m.stage("groundstate", [&] {
        auto opt = shooting_options(cfg);
        ordered_json summary = ordered_json::array();
        for (std::size_t i = 0; i < cfg.model.wells.size(); ++i) {
            double lambda = cfg.model.wells[i].value;
            auto q = radial::solve_ground_state(lambda, cfg.problem.p, opt);
            std::string stem = "groundstate_" + well_name(i);
            radial::write_profile(q, m.artifact(stem));
            m.artifact(stem + ".csv");
            m.artifact(stem + ".json");
            double scale = std::max(1.0, std::pow(lambda, cfg.problem.p / (cfg.problem.p - 1.0)));
            m.check(well_name(i) + ".residual_sup", q.residual_sup, opt.tol * scale);
            summary.push_back({{"well", i},
                               {"lambda", num(lambda)},
                               {"u0", num(q.peak())},
                               {"grad_norm_sq", num(radial::grad_norm_sq(q))},
                               {"residual_sup", num(q.residual_sup)}});
            log << well_name(i) << ": lambda " << fmt17(lambda) << ", Q(0) " << fmt17(q.peak()) << ", residual "
                << fmt17(q.residual_sup) << '\n';
        }
        open_output(m.artifact("groundstate.json")) << summary.dump(2) << '\n';
    });
}

void
limit_stage(const RunConfig& cfg, RunManifest& m, std::ostream& log)
{
    m.stage("limit_system", [&] {
        auto lim = limit_system(cfg);
        limit::write_limit_summary(*lim, m.artifact("limit_system.json"));
        for (std::size_t i = 0; i < lim->size(); ++i) {
            std::string stem = "limit_w_" + well_name(i);
            radial::write_profile(lim->w_profiles[i], m.artifact(stem));
            m.artifact(stem + ".csv");
            m.artifact(stem + ".json");
        }
        auto res = limit::system_residual(*lim);
        for (std::size_t i = 0; i < res.size(); ++i) {
            m.check(well_name(i) + ".system_residual", res[i], cfg.tol("system_residual"));
        }
        m.check("consistency", lim->consistency, cfg.tol("limit_consistency"));
        log << "b_bar " << fmt17(lim->b_bar) << ", c " << fmt17(lim->c) << '\n';
    });
}

void
energy_stage(const RunConfig& cfg, RunManifest& m, std::ostream& log)
{
    LimitPtr lim;
    m.stage("limit_system", [&] { lim = limit_system(cfg); });
    const auto& eps = cfg.scans.energy_eps;
    auto s = state_at(lim, eps.front(), centers(cfg.model));
    m.stage("expansion_scan", [&] {
        auto rep = energy::expansion_scan(s, cfg.model, eps, std::vector<Vec3>(cfg.model.wells.size()));
        energy::write_energy_csv(rep, m.artifact("energy_scan.csv"));
        m.check("fitted_order", rep.fitted_order, cfg.tol("min_fitted_order"), ">=");
        log << "fitted order " << fmt17(rep.fitted_order) << '\n';
    });
    if (cfg.model.curvature <= 0.0) {
        log << "linear term skipped: the wells are flat\n";
        return;
    }
    m.stage("linear_term", [&] {
        std::vector<Vec3> off;
        for (std::size_t j = 0; j < cfg.model.wells.size(); ++j) {
            off.push_back(fields::offset_for_gap(cfg.model, j, {0.0, 1.0, 0.0}, cfg.scans.energy_gap) -
                          cfg.model.wells[j].center);
        }
        auto lin = energy::linear_term_scan(s, cfg.model, eps, off);
        auto out = open_output(m.artifact("energy_linear.csv"));
        out << "eps,measured,predicted,relative_error\n";
        for (std::size_t k = 0; k < lin.eps.size(); ++k) {
            out << fmt17(lin.eps[k]) << ',' << fmt17(lin.measured[k]) << ',' << fmt17(lin.predicted) << ','
                << fmt17(lin.relative_error[k]) << '\n';
        }
        m.check("linear_term.relative_error", lin.relative_error.back(), cfg.tol("linear_term"));
        log << "linear term relative error " << fmt17(lin.relative_error.back()) << '\n';
    });
}

void
defect_stage(const RunConfig& cfg, RunManifest& m, std::ostream& log)
{
    m.stage("defect_scan", [&] {
        auto scan = energy::nonexistence_defect(cfg.problem, cfg.model, cfg.scans.defect_eps);
        energy::write_defect_csv(scan, m.artifact("defect_scan.csv"));
        std::size_t n = scan.eps.size();
        for (std::size_t j = 0; j < scan.oracle.size(); ++j) {
            double oracle = scan.oracle[j];
            if (oracle == 0.0) {
                log << well_name(j) << ": no coupling defect (b = 0 or a single well)\n";
                continue;
            }
            for (std::size_t k : {n - 2, n - 1}) {
                m.check(well_name(j) + ".naive_error.eps" + label(scan.eps[k]),
                        std::abs(scan.naive_ratio[k][j] - oracle) / oracle, cfg.tol("defect_naive"));
            }
            m.check(well_name(j) + ".system_ratio", std::abs(scan.system_ratio[n - 1][j]) / oracle,
                    cfg.tol("defect_system"));
            log << well_name(j) << ": oracle " << fmt17(oracle) << ", naive " << fmt17(scan.naive_ratio[n - 1][j])
                << ", system " << fmt17(scan.system_ratio[n - 1][j]) << '\n';
        }
    });
}

void
spectrum_stage(const RunConfig& cfg, RunManifest& m, std::ostream& log)
{
    LimitPtr lim;
    m.stage("limit_system", [&] { lim = limit_system(cfg); });
    m.stage("spectrum", [&] {
        std::vector<spectral::NondegeneracyReport> reports;
        for (std::size_t i = 0; i < lim->size(); ++i) {
            auto rep = spectral::nondegeneracy_report(*lim, i, cfg.scans.spectrum_ells);
            std::string w = well_name(i);
            for (const auto& mode : rep.modes) {
                double smallest = std::abs(mode.pairs.values.front()) / rep.scale;
                std::string name = w + ".ell" + std::to_string(mode.ell) + ".min_abs_over_scale";
                if (mode.ell == 1) {
                    m.check(name, smallest, cfg.tol("kernel_tol"));
                    m.check(w + ".ell1.kernel_count", mode.kernel_count, 1.0);
                } else {
                    m.check(name, smallest, cfg.tol("kernel_tol"), ">");
                }
            }
            m.check(w + ".kernel_cosine", rep.kernel_cosine, cfg.tol("kernel_cosine"), ">=");
            m.check(w + ".radial_gap", rep.radial_gap, cfg.tol("radial_gap"), ">=");
            log << w << ": kernel cosine " << fmt17(rep.kernel_cosine) << ", radial gap " << fmt17(rep.radial_gap)
                << '\n';
            reports.push_back(std::move(rep));
        }
        spectral::write_spectrum_csv(reports, m.artifact("spectrum.csv"));
    });
}

void
coercivity_stage(const RunConfig& cfg, RunManifest& m, std::ostream& log)
{
    LimitPtr lim;
    m.stage("limit_system", [&] { lim = limit_system(cfg); });
    m.stage("coercivity", [&] {
        spectral::LanczosSettings ls;
        ls.tol = cfg.tol("lanczos_tol");
        std::vector<spectral::CoercivityReport> reports;
        for (double eps : cfg.scans.coercivity_eps) {
            auto rep = spectral::coercivity_check(state_at(lim, eps, centers(cfg.model)), cfg.model,
                                                  cfg.reduction.grid, ls);
            m.check("rho.eps" + label(eps), rep.rho_estimate, 0.0, ">");
            log << "eps " << label(eps) << ": rho " << fmt17(rep.rho_estimate) << ", upper " << fmt17(rep.upper_C)
                << '\n';
            reports.push_back(std::move(rep));
        }
        spectral::write_coercivity_csv(reports, m.artifact("coercivity.csv"));
    });
}

void
pohozaev_stage(const RunConfig& cfg, RunManifest& m, std::ostream& log)
{
    LimitPtr lim;
    m.stage("limit_system", [&] { lim = limit_system(cfg); });
    m.stage("pohozaev", [&] {
        auto A = centers(cfg.model);
        auto settings = energy::settings_for(cfg.model);
        bool flat = cfg.model.curvature == 0.0 && norm(cfg.model.tilt) == 0.0;
        auto out = open_output(m.artifact("pohozaev.csv"));
        out << "eps,well,component,lhs,rhs,lhs_over_eps3,predicted_over_eps3\n";
        for (std::size_t k = 0; k < cfg.scans.pohozaev_eps.size(); ++k) {
            double eps = cfg.scans.pohozaev_eps[k];
            double eps3 = eps * eps * eps;
            bool last = k + 1 == cfg.scans.pohozaev_eps.size();
            auto W = fields::assemble_ansatz(state_at(lim, eps, A));
            for (std::size_t i = 0; i < A.size(); ++i) {
                auto rep = energy::pohozaev_residual(W, eps, cfg.model, cfg.problem, A[i], cfg.scans.pohozaev_radius,
                                                     settings);
                // int dV/dx_j u^2 = eps^3 dV/dx_j(a_i) int (w^i)^2 + O(eps^5).
                Vec3 g = fields::grad_potential(cfg.model, A[i]);
                double mass = radial::lp_norm_pow(lim->w_profiles[i], 2.0);
                double worst = 0.0;
                for (std::size_t j = 0; j < 3; ++j) {
                    double predicted = g[j] * mass;
                    out << fmt17(eps) << ',' << i << ',' << j << ',' << fmt17(rep.lhs[j]) << ',' << fmt17(rep.rhs[j])
                        << ',' << fmt17(rep.lhs[j] / eps3) << ',' << fmt17(predicted) << '\n';
                    worst = std::max(worst, std::abs(rep.lhs[j] / eps3 - predicted));
                }
                if (!last) {
                    continue;
                }
                std::string w = well_name(i);
                if (flat) {
                    m.check(w + ".identity_residual_over_eps3", rep.residual / eps3, cfg.tol("pohozaev_constant"));
                } else {
                    m.check(w + ".lhs_error_over_eps3", worst,
                            cfg.tol("pohozaev_linear") * norm(g) * mass + cfg.tol("pohozaev_constant"));
                }
                log << "eps " << label(eps) << ' ' << w << ": lhs/eps^3 " << fmt17(rep.lhs[0] / eps3) << ", "
                    << fmt17(rep.lhs[1] / eps3) << ", " << fmt17(rep.lhs[2] / eps3) << "; residual/eps^3 "
                    << fmt17(rep.residual / eps3) << '\n';
            }
        }
    });
}

void
reduce_stage(const RunConfig& cfg, RunManifest& m, std::ostream& log)
{
    LimitPtr lim;
    m.stage("limit_system", [&] { lim = limit_system(cfg); });
    auto A = centers(cfg.model);
    const auto& rs = cfg.reduction;
    auto ms = cfg.multipeak;
    if (ms.C_energy <= 0.0) {
        ms.C_energy = reduction::default_energy_bound(*lim, cfg.problem);
    }
    std::vector<reduction::ReducedLandscape> lands;
    for (double eps : cfg.scans.reduce_eps) {
        std::string tag = "eps" + label(eps);
        m.stage("reduce." + tag, [&] {
            reduction::ReducedEnergy j(cfg.model, lim, eps, rs);
            auto domain = fields::PeakDomain::preset(A);
            auto land = reduction::explore_j(j, domain, rs);
            reduction::write_landscape_csv(land, m.artifact("landscape_" + tag + ".csv"));
            log << tag << ": " << land.points.size() << " evaluations, j_min " << fmt17(land.j_min) << ", margin "
                << fmt17(land.margin) << '\n';
            m.check(tag + ".margin_over_delta", land.margin / domain.delta, 0.05, ">=");
            if (!land.interior) {
                std::ostringstream msg;
                msg << "argmin of j_eps at eps " << eps << " lies within 0.05 delta of the boundary of D_delta";
                throw Error(ErrorCode::BoundaryMinimum, msg.str());
            }
            reduction::BoxProblem problem(state_at(lim, eps, land.argmin), cfg.model, rs.grid);
            auto diag = reduction::multipeak_diagnostics(problem, land.phi.phi, A, ms);
            reduction::write_diagnostics_json(diag, &land, m.artifact("diagnostics_" + tag + ".json"));
            m.check(tag + ".phi_norm_over_eps1.5", land.phi.norm_eps / std::pow(eps, 1.5), cfg.tol("phi_bound"));
            m.check(tag + ".projected_residual", land.phi.projected_residual, rs.newton_tol);
            m.check(tag + ".unprojected_residual", land.phi.unprojected_residual,
                    cfg.tol("unprojected_factor") * rs.newton_tol);
            for (std::size_t i = 0; i < land.distances.size(); ++i) {
                m.check(tag + ".distance." + well_name(i), land.distances[i], cfg.tol("peak_distance"));
            }
            m.check_flag(tag + ".clause_i", diag.clause_i);
            m.check(tag + ".clause_ii.outside_sup", diag.outside_sup, diag.tau);
            m.check(tag + ".clause_iii.energy_ratio", diag.energy_ratio, diag.C_energy);
            log << tag << ": |phi|/eps^1.5 " << fmt17(land.phi.norm_eps / std::pow(eps, 1.5)) << ", unprojected "
                << fmt17(land.phi.unprojected_residual) << ", clauses " << diag.clause_i << diag.clause_ii
                << diag.clause_iii << '\n';
            lands.push_back(std::move(land));
        });
    }
    m.stage("peaks", [&] {
        ordered_json j;
        ordered_json per_eps = ordered_json::array();
        for (const auto& l : lands) {
            ordered_json peaks = ordered_json::array();
            for (const auto& y : l.argmin) {
                peaks.push_back(vec(y));
            }
            per_eps.push_back({{"eps", num(l.eps)}, {"peaks", peaks}});
        }
        j["argmins"] = per_eps;
        if (lands.size() >= 2) {
            auto rep = reduction::critical_point_check(lands, cfg.model, cfg.tol("critical_grad"));
            ordered_json limits = ordered_json::array();
            for (std::size_t i = 0; i < rep.limits.size(); ++i) {
                limits.push_back({{"well", i}, {"position", vec(rep.limits[i])}, {"grad_norm", num(rep.grad_norms[i])}});
                m.check("critical." + well_name(i) + ".grad_norm", rep.grad_norms[i], rep.tolerance);
            }
            j["extrapolated"] = limits;
        } else {
            j["extrapolated"] = nullptr;
        }
        open_output(m.artifact("peaks.json")) << j.dump(2) << '\n';
    });
}

} // namespace

const std::vector<std::string>&
subcommand_names()
{
    static const std::vector<std::string> names{"groundstate", "limit-system", "energy-scan", "defect-scan",
                                                "spectrum",    "coercivity",   "reduce",      "pohozaev"};
    return names;
}

void
run_stages(const std::string& name, const RunConfig& cfg, RunManifest& m, std::ostream& log)
{
    if (name == "groundstate") {
        groundstate(cfg, m, log);
    } else if (name == "limit-system") {
        limit_stage(cfg, m, log);
    } else if (name == "energy-scan") {
        energy_stage(cfg, m, log);
    } else if (name == "defect-scan") {
        defect_stage(cfg, m, log);
    } else if (name == "spectrum") {
        spectrum_stage(cfg, m, log);
    } else if (name == "coercivity") {
        coercivity_stage(cfg, m, log);
    } else if (name == "reduce") {
        reduce_stage(cfg, m, log);
    } else if (name == "pohozaev") {
        pohozaev_stage(cfg, m, log);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown subcommand '" + name + "'");
    }
}

namespace {

/// Removes the CSV and JSON files of an earlier run so stale artifacts never mix with new ones.
void
clear_artifacts(const std::filesystem::path& dir)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        return;
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".csv" || ext == ".json")) {
            std::filesystem::remove(entry.path());
        }
    }
}

} // namespace

int
run_subcommand(const std::string& name, const Overrides& overrides, std::ostream& log)
{
    std::filesystem::path fallback = "kpeaks_out";
    if (overrides.out_dir) {
        fallback = *overrides.out_dir;
    } else if (const char* env = std::getenv("KPEAKS_OUT_DIR"); env != nullptr && *env != '\0') {
        fallback = env;
    }
    RunManifest manifest(name, fallback / name);
    try {
        RunConfig cfg;
        manifest.stage("config", [&] { cfg = load_config(overrides); });
        manifest.set_dir(cfg.out_dir / name);
        clear_artifacts(cfg.out_dir / name);
        manifest.set_config(cfg);
        set_thread_count(cfg.threads);
        open_output(manifest.artifact("config.json")) << cfg.effective.dump(2) << '\n';
        run_stages(name, cfg, manifest, log);
    } catch (const Error& e) {
        manifest.fail(exit_code_for(e.code()), e.what());
        log << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        manifest.fail(exit_solver, e.what());
        log << "error: " << e.what() << '\n';
    }
    try {
        manifest.write();
    } catch (const std::exception& e) {
        log << "error: cannot write the manifest: " << e.what() << '\n';
    }
    return manifest.exit_code();
}

} // namespace kpeaks::cli
