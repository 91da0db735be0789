#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpeaks/fields/potential.hpp"
#include "kpeaks/limit/kirchhoff_limit.hpp"
#include "kpeaks/reduction/reduction.hpp"

namespace kpeaks::cli {

/// Schema tag every configuration file must carry.
inline constexpr const char* config_schema = "kpeaks-config/1";

/// eps lists and geometric parameters of the scans.
struct ScanSettings
{
    std::vector<double> energy_eps;
    /// V(y^j) - V(a_j) of the linear-term check.
    double energy_gap = 1e-2;
    std::vector<double> defect_eps;
    std::vector<double> pohozaev_eps;
    double pohozaev_radius = 0.5;
    std::vector<double> coercivity_eps;
    std::vector<double> reduce_eps;
    std::vector<int> spectrum_ells;
};

/// Fully validated run configuration.
struct RunConfig
{
    limit::ProblemParams problem;
    fields::PotentialModel model;
    ScanSettings scans;
    reduction::ReductionSettings reduction;
    reduction::MultipeakSettings multipeak;
    /// Every named tolerance with its effective value.
    std::map<std::string, double> tolerances;
    std::filesystem::path out_dir;
    int threads = 1;
    /// Effective configuration (defaults, file, overrides) in canonical form.
    nlohmann::ordered_json effective;

    double tol(const std::string& name) const;
    /// FNV-1a 64 of the canonical dump of effective, as 16 hex digits.
    std::string hash() const;
};

/// Command-line overrides, applied on top of the file in this order: preset, set, tol.
struct Overrides
{
    std::optional<std::filesystem::path> config;
    std::optional<std::string> preset;
    /// KEY=VALUE with a dotted key into the configuration and a JSON (or bare string) value.
    std::vector<std::string> set;
    /// NAME=VALUE for entries of the tolerances table.
    std::vector<std::string> tol;
    std::optional<std::filesystem::path> out_dir;
    std::optional<int> threads;
};

/// Configuration with every key at its default value.
nlohmann::ordered_json default_config();

/// Names and default values of the tolerances table.
const std::map<std::string, double>& default_tolerances();

/// Merges the file and the overrides into the defaults and validates the result.
///
/// Throws Error(ConfigError) for unreadable files, a missing or unknown schema, unknown keys, type
/// mismatches, unknown presets and any parameter that violates a module precondition.
RunConfig load_config(const Overrides& overrides);

/// Validates and converts an already merged document (out_dir falls back to KPEAKS_OUT_DIR, then the file).
RunConfig build_config(nlohmann::ordered_json doc, const std::optional<std::filesystem::path>& out_dir,
                       const std::optional<int>& threads);

} // namespace kpeaks::cli
