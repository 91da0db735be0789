#include "kpeaks/cli/manifest.hpp"

#include <cmath>

#include <json.hpp>

#include "kpeaks/core/format.hpp"

namespace kpeaks::cli {

int
exit_code_for(ErrorCode code)
{
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::GradAtCusp:
        case ErrorCode::UnresolvedPeak:
        case ErrorCode::BoxTooSmall:
        case ErrorCode::BackendMismatch:
            return exit_config;
        case ErrorCode::InvariantViolation:
        case ErrorCode::BoundaryMinimum:
            return exit_invariant;
        case ErrorCode::NoSignChange:
        case ErrorCode::MaxIterations:
        case ErrorCode::ResidualTooLarge:
        case ErrorCode::NoConvergence:
        case ErrorCode::NewtonDiverged:
        case ErrorCode::ConstraintDrift:
            return exit_solver;
    }
    return exit_solver;
}

RunManifest::RunManifest(std::string subcommand, std::filesystem::path dir)
    : subcommand_(std::move(subcommand))
    , dir_(std::move(dir))
{
}

void
RunManifest::set_config(const RunConfig& config)
{
    config_hash_ = config.hash();
    threads_ = config.threads;
    tolerances_ = config.tolerances;
}

void
RunManifest::stage(const std::string& name, const std::function<void()>& body)
{
    current_stage_ = name;
    auto start = std::chrono::steady_clock::now();
    auto finish = [&](const char* status) {
        std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        stages_.push_back(StageRecord{name, dt.count(), status});
    };
    try {
        body();
    } catch (...) {
        finish("failed");
        if (failing_stage_.empty()) {
            failing_stage_ = name;
        }
        throw;
    }
    finish("ok");
}

bool
RunManifest::check(const std::string& name, double value, double limit, const std::string& relation)
{
    bool passed = relation == ">=" ? value >= limit : relation == ">" ? value > limit : value <= limit;
    checks_.push_back(CheckRecord{current_stage_, name, value, limit, relation, passed});
    if (!passed && failing_stage_.empty()) {
        failing_stage_ = current_stage_;
    }
    return passed;
}

bool
RunManifest::check_flag(const std::string& name, bool passed)
{
    return check(name, passed ? 1.0 : 0.0, 1.0, ">=");
}

std::filesystem::path
RunManifest::artifact(const std::string& file)
{
    artifacts_.push_back(file);
    return dir_ / file;
}

void
RunManifest::fail(int exit_code, const std::string& message)
{
    if (failure_code_ == 0) {
        failure_code_ = exit_code;
        message_ = message;
    }
}

bool
RunManifest::checks_passed() const
{
    for (const auto& c : checks_) {
        if (!c.passed) {
            return false;
        }
    }
    return true;
}

int
RunManifest::exit_code() const
{
    if (failure_code_ != 0) {
        return failure_code_;
    }
    return checks_passed() ? exit_ok : exit_invariant;
}

void
RunManifest::write() const
{
    using nlohmann::ordered_json;
    auto num = [](double x) { return std::isfinite(x) ? ordered_json::parse(fmt17(x)) : ordered_json(nullptr); };
    ordered_json j;
    j["tool"] = "kpeaks";
    j["version"] = tool_version;
    j["subcommand"] = subcommand_;
    j["config_hash"] = config_hash_.empty() ? ordered_json(nullptr) : ordered_json(config_hash_);
    j["threads"] = threads_;
    ordered_json tol = ordered_json::object();
    for (const auto& [name, value] : tolerances_) {
        tol[name] = num(value);
    }
    j["tolerances"] = tol;
    ordered_json stages = ordered_json::array();
    for (const auto& s : stages_) {
        stages.push_back({{"name", s.name}, {"seconds", num(s.seconds)}, {"status", s.status}});
    }
    j["stages"] = stages;
    ordered_json checks = ordered_json::array();
    for (const auto& c : checks_) {
        checks.push_back({{"stage", c.stage},
                          {"name", c.name},
                          {"value", num(c.value)},
                          {"relation", c.relation},
                          {"limit", num(c.limit)},
                          {"passed", c.passed}});
    }
    j["checks"] = checks;
    j["artifacts"] = artifacts_;
    int code = exit_code();
    j["passed"] = code == exit_ok;
    j["exit_code"] = code;
    j["failing_stage"] = failing_stage_.empty() ? ordered_json(nullptr) : ordered_json(failing_stage_);
    j["message"] = message_.empty() ? ordered_json(nullptr) : ordered_json(message_);
    auto out = open_output(dir_ / "manifest.json");
    out << j.dump(2) << '\n';
}

} // namespace kpeaks::cli
