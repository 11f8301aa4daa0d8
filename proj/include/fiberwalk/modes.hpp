#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "fiberwalk/errors.hpp"
#include "fiberwalk/lattice.hpp"

namespace fiberwalk {

inline double wavenumber(double wavelength_um) {
    if (!(wavelength_um > 0.0)) throw std::domain_error("wavelength must be positive");
    return 2.0 * std::numbers::pi / wavelength_um;
}

// LP01 eigensolution of one step-index core at one wavelength. The transverse
// profile is J0(U r/a) inside the core matched to K0(W r/a) outside,
// normalised to unit power: integral of field^2 over the plane equals 1.
struct ModeSolution {
    double v_number = 0.0;
    double u = 0.0;
    double w = 0.0;
    double n_eff = 0.0;
    double beta = 0.0;  // rad/um
    double na = 0.0;
    double core_radius_um = 0.0;
    double norm = 0.0;  // field units, 1/um
    double wavelength_um = 0.0;

    double tail_ratio() const {
        return std::cyl_bessel_j(0, u) / std::cyl_bessel_k(0, w);
    }

    // Transverse decay rate of the cladding field, 1/um.
    double tail_rate() const { return w / core_radius_um; }

    double field_at(double r_um) const {
        if (r_um <= core_radius_um)
            return norm * std::cyl_bessel_j(0, u * r_um / core_radius_um);
        return norm * tail_ratio() * std::cyl_bessel_k(0, w * r_um / core_radius_um);
    }
};

// LP01 dispersion relation residual U J1(U)/J0(U) - W K1(W)/K0(W).
inline double lp01_dispersion_residual(double u, double w) {
    const double lhs = u * std::cyl_bessel_j(1, u) / std::cyl_bessel_j(0, u);
    const double rhs = w * std::cyl_bessel_k(1, w) / std::cyl_bessel_k(0, w);
    return lhs - rhs;
}

// Solves the LP01 mode by bracketed bisection on W in (0, V). Valid in the
// single-mode regime V < 2.405 where J0(U) keeps one sign; the bracket starts
// at W = 1e-8 because low-V roots sit deep in the small-W tail.
inline ModeSolution solve_lp01(const CoreSpec& core, double wavelength_um) {
    core.validate();
    const double k0 = wavenumber(wavelength_um);
    const double n_co = core.core_index();
    const double n_cl = core.clad_index;
    const double na = std::sqrt(n_co * n_co - n_cl * n_cl);
    const double v = std::numbers::pi * core.diameter_um * na / wavelength_um;
    if (!(v > 0.0)) throw std::domain_error("solve_lp01: core does not guide (V <= 0)");
    if (v >= 2.4048)
        throw std::domain_error("solve_lp01: V = " + std::to_string(v) + " is outside the single-mode regime (V < 2.405)");

    auto f = [v](double w) { return lp01_dispersion_residual(std::sqrt(v * v - w * w), w); };
    double lo = 1e-8;
    double hi = v * (1.0 - 1e-12);
    double flo = f(lo);
    if (!(flo > 0.0))
        throw numeric_error("solve_lp01: bracket failure at W = 1e-8 (V = " + std::to_string(v) + ")");
    for (int i = 0; i < 200 && hi - lo > 1e-16 * v; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    const double w = 0.5 * (lo + hi);
    const double u = std::sqrt(v * v - w * w);
    if (!std::isfinite(f(w)) || std::abs(f(w)) > 1e-8)
        throw numeric_error("solve_lp01: dispersion root did not converge (V = " + std::to_string(v) +
                            ", W = " + std::to_string(w) + ", residual = " + std::to_string(f(w)) + ")");

    ModeSolution m;
    m.v_number = v;
    m.u = u;
    m.w = w;
    m.na = na;
    m.core_radius_um = core.radius_um();
    m.wavelength_um = wavelength_um;
    m.beta = std::sqrt(k0 * n_cl * k0 * n_cl + (w / m.core_radius_um) * (w / m.core_radius_um));
    m.n_eff = m.beta / k0;

    // Analytic unit-power normalisation:
    //   core:  pi a^2 [J0^2(U) + J1^2(U)]
    //   clad:  pi a^2 (J0(U)/K0(W))^2 [K1^2(W) - K0^2(W)]
    const double j0 = std::cyl_bessel_j(0, u);
    const double j1 = std::cyl_bessel_j(1, u);
    const double kk0 = std::cyl_bessel_k(0, w);
    const double kk1 = std::cyl_bessel_k(1, w);
    const double a = m.core_radius_um;
    const double ratio = j0 / kk0;
    const double power = std::numbers::pi * a * a *
                         ((j0 * j0 + j1 * j1) + ratio * ratio * (kk1 * kk1 - kk0 * kk0));
    m.norm = 1.0 / std::sqrt(power);
    return m;
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            const double dp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
        }
        const double dp = n * (t * p0 - p1) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

// Integral of f(x, y) over the disk of given radius centered at the origin.
// Gauss-Legendre in r, trapezoid in theta over [0, pi] doubled (integrands
// here are even in theta).
template <typename F>
double disk_integral(double radius, F&& f, int nr = 24, int ntheta = 32) {
    const auto& [gx, gw] = gauss_legendre(nr);
    double total = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double r = 0.5 * radius * (gx[i] + 1.0);
        const double wr = 0.5 * radius * gw[i] * r;
        double ang = 0.0;
        for (int j = 0; j <= ntheta; ++j) {
            const double theta = std::numbers::pi * j / ntheta;
            const double wt = (j == 0 || j == ntheta) ? 0.5 : 1.0;
            ang += wt * f(r * std::cos(theta), r * std::sin(theta));
        }
        total += wr * ang * (std::numbers::pi / ntheta) * 2.0;
    }
    return total;
}

} // namespace detail

// Directed coupled-mode coefficient kappa_ab: core a's index perturbation
// integrated against both normalised profiles, with core b displaced by
// `separation` along x. rad/um.
inline double directed_coupling(const CoreSpec& core_a, const ModeSolution& mode_a,
                                const ModeSolution& mode_b, double separation_um) {
    const double k0 = wavenumber(mode_a.wavelength_um);
    const double n_co = core_a.core_index();
    const double n_cl = core_a.clad_index;
    const double dn2 = n_co * n_co - n_cl * n_cl;
    const double overlap = detail::disk_integral(mode_a.core_radius_um, [&](double x, double y) {
        const double ra = std::hypot(x, y);
        const double rb = std::hypot(x - separation_um, y);
        return mode_a.field_at(ra) * mode_b.field_at(rb);
    });
    return k0 * k0 * dn2 * overlap / (mode_a.beta + mode_b.beta);
}

// Symmetrised nearest-neighbour coupling sqrt(kappa_ab * kappa_ba). Strictly
// positive for guided LP01 pairs; decays exponentially with separation.
inline double coupling_coefficient(const CoreSpec& core_a, const CoreSpec& core_b,
                                   double separation_um, double wavelength_um) {
    if (!(separation_um > 0.5 * (core_a.diameter_um + core_b.diameter_um)))
        throw geometry_error("coupling_coefficient: cores overlap at separation " +
                             std::to_string(separation_um) + " um");
    const ModeSolution ma = solve_lp01(core_a, wavelength_um);
    const ModeSolution mb = solve_lp01(core_b, wavelength_um);
    const double kab = directed_coupling(core_a, ma, mb, separation_um);
    const double kba = directed_coupling(core_b, mb, ma, separation_um);
    return std::sqrt(kab * kba);
}

// Overlap integral s = <psi_a | psi_b> of two displaced normalised LP01
// modes. Evaluated as the analytic all-plane integral of the two K0 tails
// plus disk corrections where each profile differs from its tail
// continuation. Needed because at low V the modes extend over many core
// radii and s is far from negligible.
inline double mode_overlap(const ModeSolution& ma, const ModeSolution& mb, double separation_um) {
    const double d = separation_um;
    const double ca = ma.tail_rate();
    const double cb = mb.tail_rate();
    const double ta = ma.norm * ma.tail_ratio();
    const double tb = mb.norm * mb.tail_ratio();

    // Plane integral of K0(ca r) * K0(cb |r - d|): Fourier-space product of
    // 2*pi/(k^2+c^2) factors.
    double tails;
    if (std::abs(ca - cb) > 1e-3 * (ca + cb)) {
        tails = 2.0 * std::numbers::pi *
                (std::cyl_bessel_k(0, ca * d) - std::cyl_bessel_k(0, cb * d)) / (cb * cb - ca * ca);
    } else {
        const double c = 0.5 * (ca + cb);
        tails = std::numbers::pi * d * std::cyl_bessel_k(1, c * d) / c;
    }
    double s = ta * tb * tails;

    auto tail_a = [&](double r) { return ta * std::cyl_bessel_k(0, ca * r); };
    auto tail_b = [&](double r) { return tb * std::cyl_bessel_k(0, cb * r); };
    // Inside core a the true profile replaces the (singular) tail extension.
    s += detail::disk_integral(ma.core_radius_um, [&](double x, double y) {
        const double ra = std::hypot(x, y);
        const double rb = std::hypot(x - d, y);
        return (ma.field_at(ra) - tail_a(ra)) * mb.field_at(rb);
    });
    s += detail::disk_integral(mb.core_radius_um, [&](double x, double y) {
        const double rb = std::hypot(x, y);
        const double ra = std::hypot(x - d, y);
        return (mb.field_at(rb) - tail_b(rb)) * tail_a(ra);
    });
    return s;
}

// Propagation-constant shift of mode a from the index perturbation of a
// neighbouring core b at the given separation. rad/um.
inline double cross_core_shift(const CoreSpec& core_b, const ModeSolution& ma,
                               const ModeSolution& mb, double separation_um) {
    const double k0 = wavenumber(ma.wavelength_um);
    const double dn2 = core_b.core_index() * core_b.core_index() -
                       core_b.clad_index * core_b.clad_index;
    const double overlap = detail::disk_integral(mb.core_radius_um, [&](double x, double y) {
        const double ra = std::hypot(x - separation_um, y);
        const double f = ma.field_at(ra);
        return f * f;
    });
    return k0 * k0 * dn2 * overlap / (2.0 * ma.beta);
}

// Nearest-neighbour coupling entry of the lattice Hamiltonian.
struct CouplingEntry {
    std::pair<std::size_t, std::size_t> site_pair;
    double kappa = 0.0;       // rad/um
    double separation = 0.0;  // um
};

} // namespace fiberwalk
