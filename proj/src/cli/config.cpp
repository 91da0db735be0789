#include "kpeaks/cli/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kpeaks/core/error.hpp"

namespace kpeaks::cli {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void
config_error(const std::string& what)
{
    throw Error(ErrorCode::ConfigError, what);
}

std::string
join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

bool
same_kind(const ordered_json& a, const ordered_json& b)
{
    if (a.is_number() && b.is_number()) {
        return true;
    }
    return a.type() == b.type();
}

/// Copies src into dst; every key of src must already exist in dst with a compatible type (null accepts any).
void
merge(ordered_json& dst, const ordered_json& src, const std::string& path)
{
    if (!src.is_object()) {
        config_error("'" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
    }
    for (auto it = src.begin(); it != src.end(); ++it) {
        std::string key = join(path, it.key());
        if (!dst.contains(it.key())) {
            config_error("unknown configuration key '" + key + "'");
        }
        ordered_json& slot = dst[it.key()];
        if (slot.is_object()) {
            merge(slot, it.value(), key);
        } else if (slot.is_null() || it.value().is_null() || same_kind(slot, it.value())) {
            slot = it.value();
        } else {
            config_error("configuration key '" + key + "' expects a " + std::string(slot.type_name()) + ", got " +
                         it.value().type_name());
        }
    }
}

std::pair<std::string, std::string>
split_assignment(const std::string& text, const char* flag)
{
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        config_error(std::string(flag) + " expects NAME=VALUE, got '" + text + "'");
    }
    return {text.substr(0, eq), text.substr(eq + 1)};
}

/// Nested object {k1: {k2: ... value}} for the dotted key.
ordered_json
nest(const std::string& dotted, const ordered_json& value)
{
    std::vector<std::string> parts;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) {
            config_error("malformed configuration key '" + dotted + "'");
        }
        parts.push_back(part);
    }
    ordered_json out = value;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        ordered_json wrap = ordered_json::object();
        wrap[*it] = std::move(out);
        out = std::move(wrap);
    }
    return out;
}

ordered_json
parse_value(const std::string& text)
{
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        return ordered_json(text);
    }
}

double
number(const ordered_json& j, const std::string& key)
{
    if (!j.is_number()) {
        config_error("'" + key + "' must be a number");
    }
    return j.get<double>();
}

int
integer(const ordered_json& j, const std::string& key)
{
    if (!j.is_number_integer() && !j.is_number_unsigned()) {
        config_error("'" + key + "' must be an integer");
    }
    return j.get<int>();
}

std::vector<double>
eps_list(const ordered_json& j, const std::string& key, std::size_t min_size, bool decreasing)
{
    if (!j.is_array() || j.size() < min_size) {
        config_error("'" + key + "' must be an array of at least " + std::to_string(min_size) + " values");
    }
    std::vector<double> out;
    for (const auto& v : j) {
        double e = number(v, key);
        if (!(e > 0.0 && e < 1.0)) {
            config_error("'" + key + "' entries must lie in (0, 1)");
        }
        if (decreasing && !out.empty() && !(e < out.back())) {
            config_error("'" + key + "' must be strictly decreasing");
        }
        out.push_back(e);
    }
    return out;
}

Vec3
vec3(const ordered_json& j, const std::string& key)
{
    if (!j.is_array() || j.size() != 3) {
        config_error("'" + key + "' must be an array of 3 numbers");
    }
    return {number(j[0], key), number(j[1], key), number(j[2], key)};
}

/// Runs f and converts precondition failures into configuration errors.
template <class F>
void
validated(const std::string& what, F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidArgument) {
            config_error(what + ": " + e.what());
        }
        throw;
    }
}

} // namespace

const std::map<std::string, double>&
default_tolerances()
{
    static const std::map<std::string, double> tols{
        {"shooting_tol", 5e-9},         {"limit_consistency", 1e-8},  {"system_residual", 1e-7},
        {"kernel_tol", 1e-6},           {"kernel_cosine", 0.999},     {"radial_gap", 0.01},
        {"min_fitted_order", 3.5},      {"linear_term", 0.05},        {"defect_naive", 0.05},
        {"defect_system", 0.1},         {"pohozaev_constant", 1e-6},  {"pohozaev_linear", 0.1},
        {"lanczos_tol", 1e-6},          {"newton_tol", 1e-8},         {"landscape_tol", 1e-5},
        {"simplex_tol", 1e-3},          {"phi_bound", 0.2},           {"peak_distance", 0.05},
        {"unprojected_factor", 10.0},   {"critical_grad", 1e-2},
    };
    return tols;
}

ordered_json
default_config()
{
    ordered_json tol = ordered_json::object();
    for (const auto& [name, value] : default_tolerances()) {
        tol[name] = value;
    }
    ordered_json d = {
        {"schema", config_schema},
        {"problem", {{"a", 1.0}, {"b", 0.005}, {"p", 3.0}}},
        {"potential",
         {{"preset", "two_well_quadratic"},
          {"background", nullptr},
          {"curvature", nullptr},
          {"cap", nullptr},
          {"well_values", nullptr},
          {"tilt", nullptr},
          {"tilt_length", nullptr}}},
        {"scans",
         {{"energy_eps", {0.2, 0.1, 0.05, 0.025}},
          {"energy_gap", 1e-2},
          {"defect_eps", {0.004, 0.002, 0.001, 0.0005}},
          {"pohozaev_eps", {0.1, 0.05, 0.025}},
          {"pohozaev_radius", 0.5},
          {"coercivity_eps", {0.2, 0.1}},
          {"reduce_eps", {0.1}},
          {"spectrum_ells", {0, 1, 2, 3}}}},
        {"grid", {{"n", 48}, {"nodes_per_width", 8.0}}},
        {"reduction",
         {{"max_newton", 20},
          {"tau", 0.1},
          {"max_simplex_evaluations", 400},
          {"max_linear_iterations", 400},
          {"perturbed_starts", 2},
          {"seed", 20240611},
          {"max_polish", 4}}},
        {"multipeak", {{"tau_fraction", 0.01}, {"R", 10.0}, {"C_energy", 0.0}, {"maxima_floor", 0.01}, {"scan_n", 81}}},
        {"tolerances", tol},
        {"output", {{"directory", "kpeaks_out"}}},
        {"threads", 1},
    };
    return d;
}

double
RunConfig::tol(const std::string& name) const
{
    auto it = tolerances.find(name);
    require(it != tolerances.end(), "unknown tolerance " + name);
    return it->second;
}

std::string
RunConfig::hash() const
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : effective.dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

RunConfig
load_config(const Overrides& ov)
{
    ordered_json doc = default_config();
    if (ov.config) {
        std::ifstream in(*ov.config);
        if (!in) {
            config_error("cannot read configuration file " + ov.config->string());
        }
        ordered_json file;
        try {
            file = ordered_json::parse(in, nullptr, true, true);
        } catch (const nlohmann::json::parse_error& e) {
            config_error("cannot parse " + ov.config->string() + ": " + e.what());
        }
        if (!file.is_object() || !file.contains("schema")) {
            config_error("configuration file " + ov.config->string() + " lacks the 'schema' field");
        }
        if (file["schema"] != config_schema) {
            config_error("unsupported configuration schema " + file["schema"].dump() + " (expected \"" +
                         config_schema + "\")");
        }
        merge(doc, file, "");
    }
    if (ov.preset) {
        doc["potential"]["preset"] = *ov.preset;
    }
    for (const auto& s : ov.set) {
        auto [key, value] = split_assignment(s, "--set");
        merge(doc, nest(key, parse_value(value)), "");
    }
    for (const auto& t : ov.tol) {
        auto [name, value] = split_assignment(t, "--tol");
        if (!doc["tolerances"].contains(name)) {
            std::string names;
            for (const auto& kv : default_tolerances()) {
                names += " " + kv.first;
            }
            config_error("unknown tolerance '" + name + "'; valid names:" + names);
        }
        ordered_json v = parse_value(value);
        if (!v.is_number()) {
            config_error("--tol " + name + " expects a number, got '" + value + "'");
        }
        doc["tolerances"][name] = v;
    }
    return build_config(std::move(doc), ov.out_dir, ov.threads);
}

RunConfig
build_config(ordered_json doc, const std::optional<std::filesystem::path>& out_dir, const std::optional<int>& threads)
{
    if (doc.value("schema", std::string()) != config_schema) {
        config_error(std::string("configuration schema must be \"") + config_schema + "\"");
    }
    RunConfig cfg;
    if (threads) {
        doc["threads"] = *threads;
    }
    cfg.threads = integer(doc["threads"], "threads");
    if (cfg.threads < 1) {
        config_error("'threads' must be at least 1");
    }

    const auto& pr = doc["problem"];
    cfg.problem = {number(pr["a"], "problem.a"), number(pr["b"], "problem.b"), number(pr["p"], "problem.p")};
    validated("problem", [&] { cfg.problem.validate(); });

    const auto& pot = doc["potential"];
    if (!pot["preset"].is_string()) {
        config_error("'potential.preset' must be a string");
    }
    cfg.model = fields::make_preset(pot["preset"].get<std::string>());
    if (!pot["background"].is_null()) {
        cfg.model.background = number(pot["background"], "potential.background");
    }
    if (!pot["curvature"].is_null()) {
        cfg.model.curvature = number(pot["curvature"], "potential.curvature");
    }
    if (!pot["cap"].is_null()) {
        cfg.model.cap = number(pot["cap"], "potential.cap");
    }
    if (!pot["tilt"].is_null()) {
        cfg.model.tilt = vec3(pot["tilt"], "potential.tilt");
    }
    if (!pot["tilt_length"].is_null()) {
        cfg.model.tilt_length = number(pot["tilt_length"], "potential.tilt_length");
    }
    if (!pot["well_values"].is_null()) {
        const auto& wv = pot["well_values"];
        if (!wv.is_array() || wv.size() != cfg.model.wells.size()) {
            config_error("'potential.well_values' must list one value per well (" +
                         std::to_string(cfg.model.wells.size()) + ")");
        }
        for (std::size_t i = 0; i < wv.size(); ++i) {
            cfg.model.wells[i].value = number(wv[i], "potential.well_values");
        }
    }
    validated("potential", [&] {
        limit::validate_wells(cfg.model.wells);
        cfg.model.validate();
    });

    for (auto it = doc["tolerances"].begin(); it != doc["tolerances"].end(); ++it) {
        double v = number(it.value(), "tolerances." + it.key());
        if (!(v > 0.0)) {
            config_error("tolerance '" + it.key() + "' must be positive");
        }
        cfg.tolerances[it.key()] = v;
    }

    const auto& sc = doc["scans"];
    cfg.scans.energy_eps = eps_list(sc["energy_eps"], "scans.energy_eps", 2, true);
    cfg.scans.energy_gap = number(sc["energy_gap"], "scans.energy_gap");
    cfg.scans.defect_eps = eps_list(sc["defect_eps"], "scans.defect_eps", 2, true);
    cfg.scans.pohozaev_eps = eps_list(sc["pohozaev_eps"], "scans.pohozaev_eps", 1, true);
    cfg.scans.pohozaev_radius = number(sc["pohozaev_radius"], "scans.pohozaev_radius");
    cfg.scans.coercivity_eps = eps_list(sc["coercivity_eps"], "scans.coercivity_eps", 1, true);
    cfg.scans.reduce_eps = eps_list(sc["reduce_eps"], "scans.reduce_eps", 1, true);
    if (!sc["spectrum_ells"].is_array() || sc["spectrum_ells"].empty()) {
        config_error("'scans.spectrum_ells' must be a non-empty array");
    }
    for (const auto& e : sc["spectrum_ells"]) {
        int ell = integer(e, "scans.spectrum_ells");
        if (ell < 0) {
            config_error("'scans.spectrum_ells' entries must be non-negative");
        }
        cfg.scans.spectrum_ells.push_back(ell);
    }
    if (!(cfg.scans.energy_gap > 0.0) || !(cfg.scans.pohozaev_radius > 0.0)) {
        config_error("'scans.energy_gap' and 'scans.pohozaev_radius' must be positive");
    }

    auto& rs = cfg.reduction;
    rs.grid.n = integer(doc["grid"]["n"], "grid.n");
    rs.grid.nodes_per_width = number(doc["grid"]["nodes_per_width"], "grid.nodes_per_width");
    if (rs.grid.n < 8 || rs.grid.nodes_per_width < 8.0) {
        config_error("'grid.n' must be at least 8 and 'grid.nodes_per_width' at least 8");
    }
    const auto& red = doc["reduction"];
    rs.max_newton = integer(red["max_newton"], "reduction.max_newton");
    rs.tau = number(red["tau"], "reduction.tau");
    rs.max_simplex_evaluations = integer(red["max_simplex_evaluations"], "reduction.max_simplex_evaluations");
    rs.max_linear_iterations = integer(red["max_linear_iterations"], "reduction.max_linear_iterations");
    rs.perturbed_starts = integer(red["perturbed_starts"], "reduction.perturbed_starts");
    if (!red["seed"].is_number_integer() || (!red["seed"].is_number_unsigned() && red["seed"].get<std::int64_t>() < 0)) {
        config_error("'reduction.seed' must be a non-negative integer");
    }
    rs.seed = red["seed"].get<std::uint64_t>();
    rs.max_polish = integer(red["max_polish"], "reduction.max_polish");
    rs.newton_tol = cfg.tol("newton_tol");
    rs.landscape_tol = cfg.tol("landscape_tol");
    rs.simplex_tol = cfg.tol("simplex_tol");
    if (rs.max_newton < 1 || rs.max_simplex_evaluations < 1 || rs.max_linear_iterations < 1 ||
        rs.perturbed_starts < 0 || rs.max_polish < 0) {
        config_error("reduction iteration budgets must be positive");
    }
    double theta = 1.0;
    for (const auto& w : cfg.model.wells) {
        if (w.local_shape == limit::LocalShape::hoelder_cusp) {
            theta = std::min(theta, w.hoelder_theta);
        }
    }
    validated("reduction", [&] { rs.validate(theta); });

    const auto& mp = doc["multipeak"];
    auto& ms = cfg.multipeak;
    ms.tau_fraction = number(mp["tau_fraction"], "multipeak.tau_fraction");
    ms.R = number(mp["R"], "multipeak.R");
    ms.C_energy = number(mp["C_energy"], "multipeak.C_energy");
    ms.maxima_floor = number(mp["maxima_floor"], "multipeak.maxima_floor");
    ms.scan_n = integer(mp["scan_n"], "multipeak.scan_n");
    ms.max_distance = cfg.tol("peak_distance");
    if (!(ms.tau_fraction > 0.0) || !(ms.R > 0.0) || ms.scan_n < 3 || !(ms.maxima_floor >= 0.0)) {
        config_error("multipeak thresholds must be positive and scan_n at least 3");
    }

    if (out_dir) {
        cfg.out_dir = *out_dir;
    } else if (const char* env = std::getenv("KPEAKS_OUT_DIR"); env != nullptr && *env != '\0') {
        cfg.out_dir = env;
    } else {
        if (!doc["output"]["directory"].is_string()) {
            config_error("'output.directory' must be a string");
        }
        cfg.out_dir = doc["output"]["directory"].get<std::string>();
    }
    cfg.effective = std::move(doc);
    return cfg;
}

} // namespace kpeaks::cli
