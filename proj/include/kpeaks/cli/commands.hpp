#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "kpeaks/cli/config.hpp"
#include "kpeaks/cli/manifest.hpp"

namespace kpeaks::cli {

/// groundstate, limit-system, energy-scan, defect-scan, spectrum, coercivity, reduce, pohozaev.
const std::vector<std::string>& subcommand_names();

/// Runs the stages of \p name, writing artifacts through \p manifest and recording every invariant check.
/// Errors propagate; the caller maps them to exit codes.
void run_stages(const std::string& name, const RunConfig& config, RunManifest& manifest, std::ostream& log);

/// Loads the configuration, runs the subcommand and writes <out_dir>/<name>/manifest.json even on failure.
/// Returns the process exit code.
int run_subcommand(const std::string& name, const Overrides& overrides, std::ostream& log);

} // namespace kpeaks::cli
