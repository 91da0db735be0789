#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "kpeaks/cli/commands.hpp"
#include "kpeaks/core/error.hpp"

using namespace kpeaks;
using namespace kpeaks::cli;

namespace {

std::filesystem::path
scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("kpeaks_cli_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::filesystem::path
write_config(const std::filesystem::path& dir, const std::string& text)
{
    std::filesystem::create_directories(dir);
    auto path = dir / "run.cfg";
    std::ofstream(path) << text;
    return path;
}

std::string
slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json
manifest(const std::filesystem::path& dir, const std::string& sub)
{
    return nlohmann::json::parse(slurp(dir / sub / "manifest.json"));
}

ErrorCode
config_failure(const Overrides& ov)
{
    try {
        load_config(ov);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvariantViolation;
}

} // namespace

TEST_CASE("configuration: schema, unknown keys, types and preconditions are configuration errors")
{
    auto dir = scratch("config");
    Overrides ov;
    ov.config = write_config(dir, R"({"problem": {"a": 1.0}})");
    CHECK(config_failure(ov) == ErrorCode::ConfigError);
    ov.config = write_config(dir, R"({"schema": "kpeaks-config/0"})");
    CHECK(config_failure(ov) == ErrorCode::ConfigError);
    ov.config = write_config(dir, R"({"schema": "kpeaks-config/1", "problem": {"alpha": 1.0}})");
    CHECK(config_failure(ov) == ErrorCode::ConfigError);
    ov.config = write_config(dir, R"({"schema": "kpeaks-config/1", "problem": {"a": "one"}})");
    CHECK(config_failure(ov) == ErrorCode::ConfigError);
    ov.config = write_config(dir, R"({"schema": "kpeaks-config/1", "problem": {"p": 5.0}})");
    CHECK(config_failure(ov) == ErrorCode::ConfigError);
    ov.config = write_config(dir, R"({"schema": "kpeaks-config/1", "problem": {"a": 0.0}})");
    CHECK(config_failure(ov) == ErrorCode::ConfigError);
    ov.config = write_config(dir, R"({"schema": "kpeaks-config/1", "scans": {"energy_eps": [0.1, 0.2]}})");
    CHECK(config_failure(ov) == ErrorCode::ConfigError);

    Overrides flags;
    flags.tol = {"no_such_tolerance=1"};
    CHECK(config_failure(flags) == ErrorCode::ConfigError);
    flags.tol = {"newton_tol=1e-9"};
    flags.set = {"problem.b=0.25", "potential.well_values=[1.0, 1.5]"};
    auto cfg = load_config(flags);
    CHECK(cfg.reduction.newton_tol == 1e-9);
    CHECK(cfg.problem.b == 0.25);
    CHECK(cfg.model.wells[1].value == 1.5);
    CHECK(cfg.tolerances.size() == default_tolerances().size());

    // The hash follows the effective configuration.
    CHECK(load_config(flags).hash() == cfg.hash());
    flags.set.push_back("problem.b=0.5");
    CHECK(load_config(flags).hash() != cfg.hash());
}

TEST_CASE("out-dir precedence: flag, then KPEAKS_OUT_DIR, then the configuration")
{
    Overrides ov;
    ::setenv("KPEAKS_OUT_DIR", "/tmp/from_env", 1);
    CHECK(load_config(ov).out_dir == "/tmp/from_env");
    ov.out_dir = "/tmp/from_flag";
    CHECK(load_config(ov).out_dir == "/tmp/from_flag");
    ::unsetenv("KPEAKS_OUT_DIR");
    ov.out_dir.reset();
    CHECK(load_config(ov).out_dir == "kpeaks_out");
}

TEST_CASE("limit-system with b = 0 echoes c = a; a missing preset exits 2 with the valid names")
{
    auto dir = scratch("limit");
    std::ostringstream log;
    Overrides ov;
    ov.out_dir = dir;
    ov.set = {"problem.b=0", "problem.a=2.5"};
    CHECK(run_subcommand("limit-system", ov, log) == exit_ok);
    auto summary = nlohmann::json::parse(slurp(dir / "limit-system" / "limit_system.json"));
    CHECK(summary["c"].get<double>() == doctest::Approx(2.5).epsilon(1e-15));
    auto m = manifest(dir, "limit-system");
    CHECK(m["passed"] == true);
    CHECK(m["tolerances"].contains("system_residual"));
    CHECK(m["config_hash"].is_string());

    Overrides bad;
    bad.out_dir = dir;
    bad.preset = "no_such_preset";
    std::ostringstream err;
    CHECK(run_subcommand("groundstate", bad, err) == exit_config);
    CHECK(err.str().find("two_well_quadratic") != std::string::npos);
    auto fm = manifest(dir, "groundstate");
    CHECK(fm["failing_stage"] == "config");
    CHECK(fm["exit_code"] == exit_config);
}

TEST_CASE("failures: invariant violations exit 4, solver failures exit 3, manifest names the stage")
{
    auto dir = scratch("fail");
    std::ostringstream log;
    Overrides ov;
    ov.out_dir = dir;
    ov.tol = {"system_residual=1e-30"};
    CHECK(run_subcommand("limit-system", ov, log) == exit_invariant);
    auto m = manifest(dir, "limit-system");
    CHECK(m["failing_stage"] == "limit_system");
    CHECK(m["passed"] == false);

    Overrides solver;
    solver.out_dir = dir;
    solver.tol = {"shooting_tol=1e-30"};
    CHECK(run_subcommand("groundstate", solver, log) == exit_solver);
    CHECK(manifest(dir, "groundstate")["failing_stage"] == "groundstate");

    CHECK(exit_code_for(ErrorCode::BoundaryMinimum) == exit_invariant);
    CHECK(exit_code_for(ErrorCode::NewtonDiverged) == exit_solver);
    CHECK(exit_code_for(ErrorCode::UnresolvedPeak) == exit_config);
}

TEST_CASE("energy-scan on the two-well configuration passes and is bit-reproducible")
{
    auto cfg_path = std::filesystem::path(KPEAKS_SOURCE_DIR) / "configs" / "two_well_quadratic.cfg";
    std::ostringstream log;
    std::string first;
    for (const char* run : {"a", "b"}) {
        auto dir = scratch(std::string("energy_") + run);
        Overrides ov;
        ov.config = cfg_path;
        ov.out_dir = dir;
        REQUIRE(run_subcommand("energy-scan", ov, log) == exit_ok);
        auto csv = slurp(dir / "energy-scan" / "energy_scan.csv");
        CHECK(csv.find("\r") == std::string::npos);
        CHECK(csv.rfind("eps,", 0) == 0);
        if (first.empty()) {
            first = csv + slurp(dir / "energy-scan" / "energy_linear.csv");
        } else {
            CHECK(csv + slurp(dir / "energy-scan" / "energy_linear.csv") == first);
        }
        auto m = manifest(dir, "energy-scan");
        bool found = false;
        for (const auto& c : m["checks"]) {
            if (c["name"] == "fitted_order") {
                found = true;
                CHECK(c["value"].get<double>() >= 3.5);
            }
        }
        CHECK(found);
    }
}
