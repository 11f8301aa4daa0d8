// fiberwalk: continuous-time quantum walks in multicore ring fibers.
//
// Subcommands drive one configured run each: lattice generation, mode/coupling
// tables, CMT or BPM walks, wavelength sweeps, disorder ensembles, stored-run
// analysis and heatmap rendering.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "fiberwalk/runner.hpp"
#include "fiberwalk/version.hpp"

using namespace fiberwalk;

int main(int argc, char** argv) {
    CLI::App app{"quantum walks in periodic and Fibonacci multicore ring fibers"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string engine;
    std::string input;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd, bool needs_input = false) {
        cmd->add_option("--config", config_path, "TOML run configuration")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides output.dir)");
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--engine", engine, "engine override: cmt or bpm")
            ->check(CLI::IsMember({"cmt", "bpm"}));
        if (needs_input) cmd->add_option("--input", input, "input snapshots CSV")->required();
    };

    CLI::App* generate = app.add_subcommand("generate", "write the configured lattice file");
    CLI::App* modes = app.add_subcommand("modes", "dump mode and coupling tables");
    CLI::App* walk = app.add_subcommand("walk", "run one walk and write distributions");
    CLI::App* bpm = app.add_subcommand("bpm", "BPM walk with binary field dumps");
    CLI::App* sweep = app.add_subcommand("sweep", "wavelength sweep");
    CLI::App* ensemble = app.add_subcommand("ensemble", "seeded disorder ensemble");
    CLI::App* analyze = app.add_subcommand("analyze", "metrics for a stored distribution");
    CLI::App* plot = app.add_subcommand("plot", "render a heatmap from a snapshots CSV");
    for (CLI::App* cmd : {generate, modes, walk, bpm, sweep, ensemble}) add_common(cmd);
    add_common(analyze, true);
    add_common(plot, true);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config = load_run_config(config_path);
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (seed_set) config.seed = seed;
        if (engine == "cmt") config.walk.engine = EngineKind::Cmt;
        if (engine == "bpm") config.walk.engine = EngineKind::Bpm;

        if (app.got_subcommand(generate)) cmd_generate(config);
        else if (app.got_subcommand(modes)) cmd_modes(config);
        else if (app.got_subcommand(walk)) cmd_walk(config);
        else if (app.got_subcommand(bpm)) cmd_bpm(config);
        else if (app.got_subcommand(sweep)) cmd_sweep(config);
        else if (app.got_subcommand(ensemble)) cmd_ensemble(config);
        else if (app.got_subcommand(analyze)) cmd_analyze(config, input);
        else if (app.got_subcommand(plot)) cmd_plot(config, input);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fiberwalk: error: %s\n", e.what());
        return 1;
    }
    return 0;
}
