#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "fiberwalk/config.hpp"
#include "fiberwalk/pngimage.hpp"
#include "fiberwalk/version.hpp"
#include "fiberwalk/walks.hpp"

namespace fiberwalk {

// Tracks every file a command emits and writes the run manifest last, so the
// manifest always lists the complete output set.
class RunWriter {
public:
    RunWriter(const RunConfig& config, std::string command)
        : config_(config), command_(std::move(command)), dir_(config.output_dir) {
        std::filesystem::create_directories(dir_);
        started_ = now_iso();
    }

    const std::filesystem::path& dir() const { return dir_; }

    std::string path(const std::string& name) {
        files_.push_back(name);
        return (dir_ / name).string();
    }

    void finish() {
        nlohmann::json manifest;
        manifest["tool"] = "fiberwalk";
        manifest["version"] = kVersion;
        manifest["command"] = command_;
        manifest["config_hash"] = config_hash(config_);
        manifest["seed"] = config_.seed;
        manifest["started"] = started_;
        manifest["finished"] = now_iso();
        manifest["files"] = files_;
        std::ofstream f(dir_ / "manifest.json", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write manifest in " + dir_.string());
        f << manifest.dump(2) << "\n";
    }

private:
    static std::string now_iso() {
        const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    RunConfig config_;
    std::string command_;
    std::filesystem::path dir_;
    std::string started_;
    std::vector<std::string> files_;
};

inline nlohmann::json metrics_json(const WalkMetrics& m) {
    nlohmann::json j;
    j["participation_ratio"] = m.participation_ratio;
    j["variance"] = m.variance;
    j["peak_index"] = m.peak_index;
    j["center_probability"] = m.center_probability;
    j["symmetry_error"] = m.symmetry_error;
    if (m.ballistic_lobes) j["ballistic_lobes"] = {m.ballistic_lobes->first, m.ballistic_lobes->second};
    else j["ballistic_lobes"] = nullptr;
    return j;
}

inline std::string metrics_text(const WalkMetrics& m) {
    std::ostringstream os;
    char buf[64];
    auto kv = [&](const char* k, double v) {
        std::snprintf(buf, sizeof buf, "%-22s %.12g\n", k, v);
        os << buf;
    };
    kv("participation_ratio", m.participation_ratio);
    kv("variance", m.variance);
    os << "peak_index             " << m.peak_index << "\n";
    kv("center_probability", m.center_probability);
    kv("symmetry_error", m.symmetry_error);
    if (m.ballistic_lobes)
        os << "ballistic_lobes        " << m.ballistic_lobes->first << " " << m.ballistic_lobes->second << "\n";
    else
        os << "ballistic_lobes        none\n";
    return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
}

// --- commands --------------------------------------------------------------

inline void cmd_generate(const RunConfig& config) {
    RunWriter run(config, "generate");
    const Lattice lat = build_lattice_from_config(config);
    save_lattice(lat, run.path("lattice.txt"));
    run.finish();
}

inline void cmd_modes(const RunConfig& config) {
    RunWriter run(config, "modes");
    const Lattice lat = build_lattice_from_config(config);
    const LatticeHamiltonian h = build_hamiltonian(lat, config.walk.wavelength_um, config.walk.hopts);
    write_beta_csv(run.path("betas.csv"), h);
    write_coupling_csv(run.path("couplings.csv"), h);
    {
        std::ofstream f(run.path("modes.csv"), std::ios::binary);
        f << "species,diameter_um,delta_n,v_number,u,w,n_eff,beta_rad_per_um\n";
        std::set<std::tuple<double, double, double, char>> seen;
        char buf[240];
        for (const auto& site : lat.sites) {
            const auto key = std::make_tuple(site.core.diameter_um, site.core.delta_n,
                                             site.core.clad_index, species_char(site.core.label));
            if (!seen.insert(key).second) continue;
            const ModeSolution m = solve_lp01(site.core, config.walk.wavelength_um);
            std::snprintf(buf, sizeof buf, "%c,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                          species_char(site.core.label), site.core.diameter_um, site.core.delta_n,
                          m.v_number, m.u, m.w, m.n_eff, m.beta);
            f << buf;
        }
    }
    run.finish();
}

inline void cmd_walk(const RunConfig& config) {
    RunWriter run(config, "walk");
    const Lattice lat = build_lattice_from_config(config);
    save_lattice(lat, run.path("lattice.txt"));
    WalkResult r = run_walk(lat, config.walk);
    write_snapshot_series_csv(run.path("snapshots.csv"), r.snapshots);
    write_profile_csv(run.path("final_profile.csv"), r.snapshots.back());
    write_heatmap_png(run.path("heatmap.png"), r.snapshots);
    const WalkMetrics m = walk_metrics(r.snapshots.back(), lat.center_index);
    nlohmann::json j = metrics_json(m);
    j["z_um"] = r.snapshots.back().z_um;
    j["wavelength_um"] = config.walk.wavelength_um;
    if (config.walk.engine == EngineKind::Bpm) j["captured_fraction"] = r.captured_fraction;
    write_text(run.path("metrics.json"), j.dump(2) + "\n");
    run.finish();
}

inline void cmd_bpm(const RunConfig& config) {
    RunConfig c = config;
    c.walk.engine = EngineKind::Bpm;
    c.walk.keep_fields = true;
    RunWriter run(c, "bpm");
    const Lattice lat = build_lattice_from_config(c);
    save_lattice(lat, run.path("lattice.txt"));
    WalkResult r = run_walk(lat, c.walk);
    write_snapshot_series_csv(run.path("snapshots.csv"), r.snapshots);
    write_profile_csv(run.path("final_profile.csv"), r.snapshots.back());
    write_heatmap_png(run.path("heatmap.png"), r.snapshots);
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
        char name[48];
        std::snprintf(name, sizeof name, "field_%04zu.bin", i);
        write_field_dump(run.path(name), r.fields[i]);
    }
    const WalkMetrics m = walk_metrics(r.snapshots.back(), lat.center_index);
    nlohmann::json j = metrics_json(m);
    j["z_um"] = r.snapshots.back().z_um;
    j["captured_fraction"] = r.captured_fraction;
    j["band_edge_fraction"] = r.bpm_stats.max_band_edge_fraction;
    write_text(run.path("metrics.json"), j.dump(2) + "\n");
    run.finish();
}

inline void cmd_sweep(const RunConfig& config) {
    RunWriter run(config, "sweep");
    const Lattice lat = build_lattice_from_config(config);
    const SweepResult sr = wavelength_sweep(lat, config.walk.engine, config.lambda_start_um,
                                            config.lambda_end_um, config.sweep_steps,
                                            config.walk.z_max_um, config.walk);
    write_profile_csv(run.path("sweep_mean.csv"), sr.mean);
    {
        std::ofstream f(run.path("sweep_per_lambda.csv"), std::ios::binary);
        f << "lambda_um";
        for (std::size_t n = 0; n < sr.mean.size(); ++n) f << ",site_" << n;
        f << "\n";
        char buf[40];
        for (const auto& d : sr.per_wavelength) {
            std::snprintf(buf, sizeof buf, "%.12g", d.wavelength_um);
            f << buf;
            for (double v : d.p) {
                std::snprintf(buf, sizeof buf, "%.12g", v);
                f << ',' << buf;
            }
            f << "\n";
        }
    }
    write_heatmap_png(run.path("sweep_heatmap.png"), sr.per_wavelength);
    const WalkMetrics m = walk_metrics(sr.mean, lat.center_index);
    write_text(run.path("metrics.json"), metrics_json(m).dump(2) + "\n");
    run.finish();
}

inline void cmd_ensemble(const RunConfig& config) {
    RunWriter run(config, "ensemble");
    const Lattice lat = build_lattice_from_config(config);
    const EnsembleReport rep = disorder_ensemble(lat, config.jitter, config.members, config.seed,
                                                 config.walk.z_max_um, config.walk);
    write_ensemble_csv(run.path("ensemble.csv"), rep);
    write_profile_csv(run.path("ensemble_mean.csv"), rep.mean);
    nlohmann::json j;
    j["members"] = config.members;
    j["jitter"] = config.jitter;
    j["seed"] = config.seed;
    j["center_retention"] = rep.center_retention;
    j["mean_metrics"] = metrics_json(walk_metrics(rep.mean, lat.center_index));
    write_text(run.path("ensemble_summary.json"), j.dump(2) + "\n");
    run.finish();
}

inline void cmd_analyze(const RunConfig& config, const std::string& input_csv) {
    RunWriter run(config, "analyze");
    const auto snapshots = read_snapshot_series_csv(input_csv);
    if (snapshots.empty()) throw std::domain_error("analyze: no snapshots in " + input_csv);
    const Lattice lat = build_lattice_from_config(config);
    if (snapshots.back().size() != lat.size())
        throw std::domain_error("analyze: distribution length does not match the configured lattice");
    const WalkMetrics m = walk_metrics(snapshots.back(), lat.center_index);
    write_text(run.path("metrics.json"), metrics_json(m).dump(2) + "\n");
    write_text(run.path("metrics.txt"), metrics_text(m));
    run.finish();
}

inline void cmd_plot(const RunConfig& config, const std::string& input_csv) {
    RunWriter run(config, "plot");
    const auto snapshots = read_snapshot_series_csv(input_csv);
    write_heatmap_png(run.path("heatmap.png"), snapshots);
    run.finish();
}

} // namespace fiberwalk
