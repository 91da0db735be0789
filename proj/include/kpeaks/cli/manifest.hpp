#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kpeaks/cli/config.hpp"
#include "kpeaks/core/error.hpp"

namespace kpeaks::cli {

/// Process exit codes.
enum ExitCode : int
{
    exit_ok = 0,
    exit_config = 2,
    exit_solver = 3,
    exit_invariant = 4
};

/// Configuration and request errors map to 2, invariant and boundary verdicts to 4, solver failures to 3.
int exit_code_for(ErrorCode code);

/// Tool version recorded in every manifest.
inline constexpr const char* tool_version = "1.0.0";

/// One invariant check of a stage.
struct CheckRecord
{
    std::string stage;
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    /// "<=", ">=" or ">".
    std::string relation;
    bool passed = false;
};

struct StageRecord
{
    std::string name;
    double seconds = 0.0;
    /// "ok" or "failed".
    std::string status;
};

/// Run manifest: configuration hash, version, per-stage wall-clock, tolerances, checks and the failure point.
class RunManifest
{
  public:
    RunManifest(std::string subcommand, std::filesystem::path dir);

    /// Moves the output directory (used once the configuration names it).
    void set_dir(std::filesystem::path dir)
    {
        dir_ = std::move(dir);
    }

    /// Attaches the validated configuration (hash, tolerances, thread count).
    void set_config(const RunConfig& config);

    /// Runs body as a timed stage; an escaping exception marks the stage as failing and is rethrown.
    void stage(const std::string& name, const std::function<void()>& body);

    /// Records value <= limit (or the given relation ">=", ">") for the current stage and returns the verdict.
    bool check(const std::string& name, double value, double limit, const std::string& relation = "<=");

    /// Records a boolean invariant.
    bool check_flag(const std::string& name, bool passed);

    /// Output file relative to the manifest directory.
    std::filesystem::path artifact(const std::string& file);

    /// Records a failure with its exit code and message.
    void fail(int exit_code, const std::string& message);

    bool checks_passed() const;

    /// 0 when every check passed and no failure was recorded; 4 for a failed check otherwise.
    int exit_code() const;

    const std::filesystem::path& dir() const
    {
        return dir_;
    }
    const std::vector<CheckRecord>& checks() const
    {
        return checks_;
    }

    /// Writes <dir>/manifest.json.
    void write() const;

  private:
    std::string subcommand_;
    std::filesystem::path dir_;
    std::string config_hash_;
    int threads_ = 1;
    std::map<std::string, double> tolerances_;
    std::vector<StageRecord> stages_;
    std::vector<CheckRecord> checks_;
    std::vector<std::string> artifacts_;
    std::string current_stage_;
    std::string failing_stage_;
    std::string message_;
    int failure_code_ = 0;
};

} // namespace kpeaks::cli
