#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fiberwalk/analysis.hpp"
#include "fiberwalk/bpm.hpp"
#include "fiberwalk/cmt.hpp"
#include "fiberwalk/hamiltonian.hpp"

namespace fiberwalk {

enum class EngineKind { Cmt, Bpm };

struct WalkParams {
    EngineKind engine = EngineKind::Cmt;
    double wavelength_um = 1.55;
    double z_max_um = 41000.0;
    int snapshots = 2;
    HamiltonianOptions hopts;
    // BPM grid controls; window 0 means derive from the lattice extent.
    double bpm_resolution_um = 0.25;
    double bpm_dz_um = 0.5;
    double bpm_window_x_um = 0.0;
    double bpm_window_y_um = 0.0;
    BpmLayout bpm_layout = BpmLayout::UnrolledLine;
    BpmOptions bpm_opts;
    ExtractionBasis extraction = ExtractionBasis::Projection;
    bool keep_fields = false;  // retain BPM field snapshots for dumping
};

struct WalkResult {
    std::vector<Distribution> snapshots;
    double captured_fraction = 1.0;              // BPM: raw captured fraction at z_max
    std::vector<ScalarField2D> fields;           // BPM, when keep_fields is set
    BpmRunStats bpm_stats;
};

// Window that holds every core, the slowly decaying LP01 tails, and the 10%
// absorbing margins.
inline std::pair<double, double> default_bpm_window(const Lattice& lat, BpmLayout layout) {
    constexpr double tail_margin = 80.0;  // um beyond the outermost core
    if (layout == BpmLayout::FullRing && lat.geometry == GeometryKind::Ring) {
        const double w = 2.0 * (*lat.ring_radius_um + tail_margin);
        return {w, w};
    }
    double lo = 0.0, hi = 0.0;
    const Lattice line = unroll_lattice(lat);
    for (const auto& s : line.sites) {
        lo = std::min(lo, s.x_um);
        hi = std::max(hi, s.x_um);
    }
    return {hi - lo + 2.0 * tail_margin, 128.0};
}

inline WalkResult run_walk(const Lattice& lattice, const WalkParams& p) {
    if (lattice.size() == 0) throw std::domain_error("run_walk: empty lattice");
    WalkResult out;
    if (p.engine == EngineKind::Cmt) {
        LatticeHamiltonian h = build_hamiltonian(lattice, p.wavelength_um, p.hopts);
        if (p.z_max_um == 0.0) {
            Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(lattice.size()));
            psi0[static_cast<Eigen::Index>(lattice.center_index)] = 1.0;
            out.snapshots.push_back(probability_distribution({psi0, 0.0}, p.wavelength_um));
            return out;
        }
        EvolutionResult r = evolve(h, lattice.center_index, p.z_max_um, std::max(2, p.snapshots));
        out.snapshots = to_distributions(r);
        return out;
    }

    // geo carries the frame the BPM grid lives in; the layout transform has
    // already been applied, so rasterize gets the identity layout.
    const Lattice geo = (p.bpm_layout == BpmLayout::UnrolledLine) ? unroll_lattice(lattice) : lattice;
    auto [wx, wy] = default_bpm_window(lattice, p.bpm_layout);
    if (p.bpm_window_x_um > 0.0) wx = p.bpm_window_x_um;
    if (p.bpm_window_y_um > 0.0) wy = p.bpm_window_y_um;
    IndexMap map = rasterize(geo, p.bpm_resolution_um, wx, wy, BpmLayout::FullRing);
    ScalarField2D f0 = launch_field(geo, geo.center_index, map, p.wavelength_um);
    int cadence = 1 << 30;
    if (p.z_max_um > 0.0 && p.snapshots > 2) {
        const int nsteps = std::max(1, static_cast<int>(std::ceil(p.z_max_um / p.bpm_dz_um - 1e-9)));
        cadence = std::max(1, nsteps / (p.snapshots - 1));
    }
    auto fields = propagate(map, f0, p.z_max_um, p.bpm_dz_um, cadence, p.bpm_opts,
                            p.wavelength_um, &out.bpm_stats);
    out.snapshots.reserve(fields.size());
    for (const auto& f : fields) {
        CorePowers cp = extract_core_powers(f, geo, p.wavelength_um, p.extraction);
        out.snapshots.push_back(cp.distribution);
        out.captured_fraction = cp.captured_fraction;
    }
    if (p.keep_fields) {
        // Full grids are ~10 MB each; retain at most nine planes (ends
        // included) for dumping.
        const std::size_t total = fields.size();
        const std::size_t keep = std::min<std::size_t>(total, 9);
        for (std::size_t k = 0; k < keep; ++k) {
            const std::size_t idx = (keep == 1) ? 0 : k * (total - 1) / (keep - 1);
            out.fields.push_back(std::move(fields[idx]));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Wavelength sweep: independent evolutions on a uniform wavelength grid,
// averaged pointwise and renormalised.
// ---------------------------------------------------------------------------

struct SweepResult {
    Distribution mean;
    std::vector<Distribution> per_wavelength;
};

inline SweepResult wavelength_sweep(const Lattice& lattice, EngineKind engine,
                                    double lambda_start_um, double lambda_end_um, int steps,
                                    double z_um, WalkParams base = {}) {
    if (steps < 1) throw std::domain_error("wavelength_sweep: steps must be >= 1");
    if (steps > 1 && !(lambda_start_um < lambda_end_um))
        throw std::domain_error("wavelength_sweep: need lambda_start < lambda_end");
    base.engine = engine;
    base.z_max_um = z_um;
    base.snapshots = 2;
    SweepResult out;
    out.per_wavelength.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        const double lam = (steps == 1)
                               ? lambda_start_um
                               : lambda_start_um + (lambda_end_um - lambda_start_um) * i / (steps - 1);
        base.wavelength_um = lam;
        try {
            WalkResult r = run_walk(lattice, base);
            out.per_wavelength.push_back(r.snapshots.back());
        } catch (const std::exception& e) {
            throw numeric_error("wavelength_sweep: failure at wavelength " + std::to_string(lam) +
                                " um: " + e.what());
        }
    }
    out.mean = mean_distribution(out.per_wavelength);
    return out;
}

// ---------------------------------------------------------------------------
// Disorder ensemble: seeded diameter jitter, one CMT evolution per member.
// ---------------------------------------------------------------------------

struct EnsembleMember {
    std::uint64_t seed = 0;
    WalkMetrics metrics;
    bool center_peaked = false;
};

struct EnsembleReport {
    Distribution mean;
    std::vector<EnsembleMember> members;
    std::vector<Distribution> distributions;
    double center_retention = 0.0;  // fraction of members peaked at the centre
};

inline EnsembleReport disorder_ensemble(const Lattice& lattice, double jitter, int n_members,
                                        std::uint64_t seed, double z_um, WalkParams base = {}) {
    if (n_members < 1) throw std::domain_error("disorder_ensemble: need at least one member");
    base.engine = EngineKind::Cmt;
    base.z_max_um = z_um;
    base.snapshots = 2;
    EnsembleReport out;
    out.members.reserve(static_cast<std::size_t>(n_members));
    int peaked = 0;
    for (int i = 0; i < n_members; ++i) {
        const std::uint64_t member_seed = seed + static_cast<std::uint64_t>(i);
        Lattice member = perturb_lattice(lattice, jitter, member_seed);
        WalkResult r = run_walk(member, base);
        const Distribution& d = r.snapshots.back();
        EnsembleMember em;
        em.seed = member_seed;
        em.metrics = walk_metrics(d, lattice.center_index);
        em.center_peaked = em.metrics.peak_index == static_cast<int>(lattice.center_index);
        if (em.center_peaked) ++peaked;
        out.members.push_back(em);
        out.distributions.push_back(d);
    }
    out.mean = mean_distribution(out.distributions);
    out.center_retention = static_cast<double>(peaked) / n_members;
    return out;
}

// Ensemble CSV: one row per member.
inline void write_ensemble_csv(const std::string& path, const EnsembleReport& rep) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "member,seed,participation_ratio,variance,peak_index,center_probability,symmetry_error,center_peaked\n";
    char buf[40];
    for (std::size_t i = 0; i < rep.members.size(); ++i) {
        const auto& m = rep.members[i];
        f << i << ',' << m.seed;
        std::snprintf(buf, sizeof buf, "%.12g", m.metrics.participation_ratio);
        f << ',' << buf;
        std::snprintf(buf, sizeof buf, "%.12g", m.metrics.variance);
        f << ',' << buf << ',' << m.metrics.peak_index;
        std::snprintf(buf, sizeof buf, "%.12g", m.metrics.center_probability);
        f << ',' << buf;
        std::snprintf(buf, sizeof buf, "%.12g", m.metrics.symmetry_error);
        f << ',' << buf << ',' << (m.center_peaked ? 1 : 0) << "\n";
    }
}

} // namespace fiberwalk
