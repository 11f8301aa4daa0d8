#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>
#include <vector>

#include "fiberwalk/lattice.hpp"
#include "fiberwalk/modes.hpp"

namespace fiberwalk {

// How mode non-orthogonality enters the tight-binding matrix. At these fiber
// parameters (V ~ 0.92) neighbouring LP01 modes overlap by s ~ 0.6, so the
// bare overlap couplings underestimate the real splittings.
enum class OverlapCorrection {
    None,      // bare beta diagonal, bare symmetrised couplings
    Pairwise,  // each coupling replaced by the two-mode value (k - s*sigma)/(1 - s^2)
    Lowdin,    // symmetric orthogonalisation S^(-1/2) H' S^(-1/2) of the full basis
};

struct HamiltonianOptions {
    // Pairs beyond nearest neighbours enter only when their coupling exceeds
    // this cutoff; below it they are treated as decoupled.
    double kappa_cutoff = 1e-9;  // rad/um
    // Restrict to consecutive-site couplings regardless of cutoff.
    bool nearest_neighbor_only = false;
    OverlapCorrection correction = OverlapCorrection::None;
};

// Real symmetric tight-binding matrix: propagation constants on the
// diagonal, couplings off it. rad/um.
struct LatticeHamiltonian {
    Eigen::MatrixXd matrix;
    std::vector<double> betas;
    std::vector<CouplingEntry> couplings;
    double wavelength_um = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

inline LatticeHamiltonian build_hamiltonian(const Lattice& lattice, double wavelength_um,
                                            const HamiltonianOptions& opts = {}) {
    const std::size_t n = lattice.size();
    if (n == 0) throw std::domain_error("build_hamiltonian: empty lattice");
    const bool want_overlap = opts.correction != OverlapCorrection::None;

    // One mode solve per distinct core geometry.
    using CoreKey = std::tuple<double, double, double>;
    std::map<CoreKey, ModeSolution> modes;
    auto mode_of = [&](const CoreSpec& c) -> const ModeSolution& {
        const CoreKey key{c.diameter_um, c.delta_n, c.clad_index};
        auto it = modes.find(key);
        if (it == modes.end()) it = modes.emplace(key, solve_lp01(c, wavelength_um)).first;
        return it->second;
    };

    LatticeHamiltonian h;
    h.wavelength_um = wavelength_um;
    h.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    h.betas.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        h.betas[i] = mode_of(lattice.sites[i].core).beta;
        h.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = h.betas[i];
    }

    // Pair values depend only on (core geometry, core geometry, separation);
    // cache them so the many equal-pitch pairs of a ring cost one quadrature.
    // Fields ending in _12 run from the canonical first core to the second.
    struct PairData {
        double kappa = 0.0;     // sqrt(kappa_ab * kappa_ba)
        double s = 0.0;         // mode overlap
        double sigma_12 = 0.0;  // shift of mode 1 from core 2
        double sigma_21 = 0.0;
    };
    using PairKey = std::tuple<CoreKey, CoreKey, double>;
    std::map<PairKey, PairData> pair_cache;

    auto pair_value = [&](const CoreSpec& ca, const CoreSpec& cb, double sep,
                          bool& swapped) -> const PairData& {
        CoreKey ka{ca.diameter_um, ca.delta_n, ca.clad_index};
        CoreKey kb{cb.diameter_um, cb.delta_n, cb.clad_index};
        const CoreSpec* pa = &ca;
        const CoreSpec* pb = &cb;
        swapped = kb < ka;
        if (swapped) {
            std::swap(ka, kb);
            std::swap(pa, pb);
        }
        const PairKey key{ka, kb, sep};
        auto it = pair_cache.find(key);
        if (it == pair_cache.end()) {
            const ModeSolution& ma = mode_of(*pa);
            const ModeSolution& mb = mode_of(*pb);
            PairData d;
            const double kab = directed_coupling(*pa, ma, mb, sep);
            const double kba = directed_coupling(*pb, mb, ma, sep);
            d.kappa = std::sqrt(kab * kba);
            if (want_overlap) {
                d.s = mode_overlap(ma, mb, sep);
                d.sigma_12 = cross_core_shift(*pb, ma, mb, sep);
                d.sigma_21 = cross_core_shift(*pa, mb, ma, sep);
            }
            it = pair_cache.emplace(key, d).first;
        }
        return it->second;
    };

    // Cheap strict upper bound on |kappa| for skipping far pairs: peak field
    // of one mode times the other's tail at closest approach over the whole
    // perturbation disk.
    auto kappa_bound = [&](const CoreSpec& ca, const ModeSolution& ma,
                           const ModeSolution& mb, double sep) {
        const double k0 = wavenumber(wavelength_um);
        const double dn2 = ca.core_index() * ca.core_index() - ca.clad_index * ca.clad_index;
        const double area = std::numbers::pi * ma.core_radius_um * ma.core_radius_um;
        const double psi_a_max = ma.norm;
        const double psi_b_near = mb.field_at(std::max(sep - ma.core_radius_um, mb.core_radius_um));
        return k0 * k0 * dn2 * area * psi_a_max * psi_b_near / (ma.beta + mb.beta);
    };

    struct IncludedPair {
        std::size_t i, j;
        PairData data;
    };
    std::vector<IncludedPair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1);
            if (opts.nearest_neighbor_only && !adjacent) continue;
            // Quantize separations at 1e-6 um so mirror-image pairs, whose
            // floating-point distances differ in the last bits, share one
            // cache entry and one cutoff decision. Keeps centrosymmetric
            // lattices exactly centrosymmetric.
            const double sep = std::round(lattice.separation_um(i, j) * 1e6) / 1e6;
            const CoreSpec& ca = lattice.sites[i].core;
            const CoreSpec& cb = lattice.sites[j].core;
            if (!adjacent) {
                // Orientation-symmetric bound on sqrt(kappa_ab * kappa_ba).
                const double bound = std::sqrt(kappa_bound(ca, mode_of(ca), mode_of(cb), sep) *
                                               kappa_bound(cb, mode_of(cb), mode_of(ca), sep));
                if (bound < 0.1 * opts.kappa_cutoff) continue;
            }
            bool swapped = false;
            PairData d = pair_value(ca, cb, sep, swapped);
            if (swapped) std::swap(d.sigma_12, d.sigma_21);
            if (!adjacent && d.kappa < opts.kappa_cutoff) continue;
            pairs.push_back({i, j, d});
            h.couplings.push_back({{i, j}, d.kappa, sep});
        }
    }

    auto set = [&](std::size_t i, std::size_t j, double v) {
        h.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        h.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    };

    switch (opts.correction) {
    case OverlapCorrection::None:
        for (const auto& p : pairs) set(p.i, p.j, p.data.kappa);
        break;
    case OverlapCorrection::Pairwise:
        for (const auto& p : pairs) {
            const double sig = 0.5 * (p.data.sigma_12 + p.data.sigma_21);
            set(p.i, p.j, (p.data.kappa - p.data.s * sig) / (1.0 - p.data.s * p.data.s));
        }
        break;
    case OverlapCorrection::Lowdin: {
        // Non-orthogonal two-centre matrices: overlap S and
        // H'_mn = kappa_mn + beta_mean * s_mn, H'_nn = beta_n + sum of
        // neighbour shifts; then the orthogonalised S^(-1/2) H' S^(-1/2).
        const auto ni = static_cast<Eigen::Index>(n);
        Eigen::MatrixXd overlap = Eigen::MatrixXd::Identity(ni, ni);
        Eigen::MatrixXd hp = Eigen::MatrixXd::Zero(ni, ni);
        for (std::size_t i = 0; i < n; ++i)
            hp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = h.betas[i];
        for (const auto& p : pairs) {
            const auto i = static_cast<Eigen::Index>(p.i);
            const auto j = static_cast<Eigen::Index>(p.j);
            overlap(i, j) = overlap(j, i) = p.data.s;
            const double bmean = 0.5 * (h.betas[p.i] + h.betas[p.j]);
            hp(i, j) = hp(j, i) = p.data.kappa + bmean * p.data.s;
            hp(i, i) += p.data.sigma_12;
            hp(j, j) += p.data.sigma_21;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(overlap);
        if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < 1e-6)
            throw numeric_error("build_hamiltonian: overlap matrix is not safely positive definite");
        const Eigen::MatrixXd root_inv = es.eigenvectors() *
                                         es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                         es.eigenvectors().transpose();
        Eigen::MatrixXd tilde = root_inv * hp * root_inv;
        h.matrix = 0.5 * (tilde + tilde.transpose());
        break;
    }
    }
    return h;
}

// CSV dumps for inspection: per-site propagation constants and pair couplings.
inline void write_beta_csv(const std::string& path, const LatticeHamiltonian& h) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "site,beta_rad_per_um\n";
    char buf[40];
    for (std::size_t i = 0; i < h.betas.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", h.betas[i]);
        f << i << ',' << buf << "\n";
    }
}

inline void write_coupling_csv(const std::string& path, const LatticeHamiltonian& h) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "site_a,site_b,kappa_rad_per_um,separation_um\n";
    char kb[40], sb[40];
    for (const auto& c : h.couplings) {
        std::snprintf(kb, sizeof kb, "%.12g", c.kappa);
        std::snprintf(sb, sizeof sb, "%.12g", c.separation);
        f << c.site_pair.first << ',' << c.site_pair.second << ',' << kb << ',' << sb << "\n";
    }
}

} // namespace fiberwalk
