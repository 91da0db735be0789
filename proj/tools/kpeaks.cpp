#include <iostream>

#include <CLI11.hpp>

#include "kpeaks/cli/commands.hpp"
#include "kpeaks/fields/potential.hpp"

using namespace kpeaks;

int
main(int argc, char** argv)
{
    CLI::App app{"Multi-peak solutions of a Kirchhoff-type Schroedinger equation: scans, checks and manifests"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cli::tool_version);

    cli::Overrides ov;
    std::string config;
    std::string preset;
    std::string out_dir;
    int threads = 0;
    auto* config_opt = app.add_option("--config", config, "Configuration file (schema " + std::string(cli::config_schema) + ")");
    auto* out_opt = app.add_option("--out-dir", out_dir, "Output directory (default: KPEAKS_OUT_DIR, then the config)");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tol", ov.tol, "Override a named tolerance, NAME=VALUE (repeatable)");
    auto* preset_opt = app.add_option("--preset", preset, "Potential preset name");
    app.add_option("--set", ov.set, "Override a configuration key, dotted.key=VALUE (repeatable)");

    std::string chosen;
    for (const auto& name : cli::subcommand_names()) {
        app.add_subcommand(name)->fallthrough()->callback([&chosen, name] { chosen = name; });
    }
    auto* presets = app.add_subcommand("presets", "List the potential presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_config;
    }
    if (presets->parsed()) {
        for (const auto& n : fields::preset_names()) {
            std::cout << n << '\n';
        }
        return 0;
    }
    if (*config_opt) {
        ov.config = config;
    }
    if (*out_opt) {
        ov.out_dir = out_dir;
    }
    if (*threads_opt) {
        ov.threads = threads;
    }
    if (*preset_opt) {
        ov.preset = preset;
    }
    int code = cli::run_subcommand(chosen, ov, std::cerr);
    std::cerr << chosen << ": exit " << code << '\n';
    return code;
}
