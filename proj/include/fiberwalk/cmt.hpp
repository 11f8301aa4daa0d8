#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "fiberwalk/distribution.hpp"
#include "fiberwalk/hamiltonian.hpp"

namespace fiberwalk {

// Complex per-site amplitudes at one propagation distance.
struct FieldState {
    Eigen::VectorXcd amplitudes;
    double z_um = 0.0;
};

struct EvolutionResult {
    std::vector<FieldState> snapshots;
    Eigen::VectorXd eigenvalues;  // rad/um
    double wavelength_um = 0.0;
};

// Exact evolution under exp(i H z) via the symmetric eigendecomposition.
// No step error; unitary to eigensolver accuracy.
class CmtPropagator {
public:
    explicit CmtPropagator(const LatticeHamiltonian& h) : wavelength_um_(h.wavelength_um) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
        if (solver.info() != Eigen::Success)
            throw numeric_error("CmtPropagator: eigendecomposition failed");
        vectors_ = solver.eigenvectors();
        values_ = solver.eigenvalues();
    }

    Eigen::Index size() const { return values_.size(); }
    const Eigen::VectorXd& eigenvalues() const { return values_; }
    double wavelength_um() const { return wavelength_um_; }

    Eigen::VectorXcd propagate(const Eigen::VectorXcd& psi0, double z_um) const {
        const std::complex<double> iz(0.0, z_um);
        Eigen::VectorXcd coeffs = vectors_.transpose().cast<std::complex<double>>() * psi0;
        for (Eigen::Index k = 0; k < coeffs.size(); ++k)
            coeffs[k] *= std::exp(iz * values_[k]);
        return vectors_.cast<std::complex<double>>() * coeffs;
    }

private:
    Eigen::MatrixXd vectors_;
    Eigen::VectorXd values_;
    double wavelength_um_ = 0.0;
};

// Unit excitation at source_index evolved to z_max, sampled at n_snapshots
// uniform distances including z = 0 and z = z_max.
inline EvolutionResult evolve(const LatticeHamiltonian& h, std::size_t source_index,
                              double z_max_um, int n_snapshots) {
    const std::size_t n = h.size();
    if (source_index >= n) throw std::domain_error("evolve: source index out of range");
    if (!(z_max_um > 0.0)) throw std::domain_error("evolve: z_max must be positive");
    if (n_snapshots < 2) throw std::domain_error("evolve: need at least 2 snapshots (z = 0 and z = z_max)");

    CmtPropagator prop(h);
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    psi0[static_cast<Eigen::Index>(source_index)] = 1.0;

    EvolutionResult out;
    out.eigenvalues = prop.eigenvalues();
    out.wavelength_um = h.wavelength_um;
    out.snapshots.reserve(static_cast<std::size_t>(n_snapshots));
    for (int k = 0; k < n_snapshots; ++k) {
        const double z = z_max_um * static_cast<double>(k) / static_cast<double>(n_snapshots - 1);
        out.snapshots.push_back({prop.propagate(psi0, z), z});
    }
    return out;
}

inline Distribution probability_distribution(const FieldState& state, double wavelength_um = 0.0) {
    Distribution d;
    d.z_um = state.z_um;
    d.wavelength_um = wavelength_um;
    d.p.resize(static_cast<std::size_t>(state.amplitudes.size()));
    for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i)
        d.p[static_cast<std::size_t>(i)] = std::norm(state.amplitudes[i]);
    return d;
}

inline std::vector<Distribution> to_distributions(const EvolutionResult& r) {
    std::vector<Distribution> out;
    out.reserve(r.snapshots.size());
    for (const auto& s : r.snapshots) out.push_back(probability_distribution(s, r.wavelength_um));
    return out;
}

} // namespace fiberwalk
