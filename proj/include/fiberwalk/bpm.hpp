#pragma once

#include <fftw3.h>

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <mutex>
#include <vector>

#include "fiberwalk/distribution.hpp"
#include "fiberwalk/lattice.hpp"
#include "fiberwalk/modes.hpp"

namespace fiberwalk {

enum class BpmLayout { FullRing, UnrolledLine };

// Real refractive index per cell plus grid geometry. Grid dimensions are
// powers of two; cell centers sit at x0 + (i + 1/2) dx.
struct IndexMap {
    int nx = 0, ny = 0;
    double dx_um = 0.0, dy_um = 0.0;
    double x0_um = 0.0, y0_um = 0.0;  // window corner
    double reference_index = 1.444;   // n0
    std::vector<double> n;            // ix + nx*iy

    double x_center(int ix) const { return x0_um + (ix + 0.5) * dx_um; }
    double y_center(int iy) const { return y0_um + (iy + 0.5) * dy_um; }
    double window_x() const { return nx * dx_um; }
    double window_y() const { return ny * dy_um; }
};

// Complex transverse field on the same grid.
struct ScalarField2D {
    int nx = 0, ny = 0;
    double dx_um = 0.0, dy_um = 0.0;
    double x0_um = 0.0, y0_um = 0.0;
    double z_um = 0.0;
    std::vector<std::complex<double>> e;  // ix + nx*iy

    double cell_area() const { return dx_um * dy_um; }

    double power() const {
        double s = 0.0;
        for (const auto& v : e) s += std::norm(v);
        return s * cell_area();
    }
};

// Straightens a ring lattice onto a line: x becomes the arc coordinate, all
// other core data unchanged. Valid when the ring radius is much larger than
// the pitch. Line lattices pass through untouched.
inline Lattice unroll_lattice(const Lattice& lat) {
    if (lat.geometry == GeometryKind::Line) return lat;
    Lattice out = lat;
    out.geometry = GeometryKind::Line;
    out.ring_radius_um.reset();
    for (std::size_t i = 0; i < lat.sites.size(); ++i) {
        out.sites[i].x_um = lat.arc_coordinate_um(i);
        out.sites[i].y_um = 0.0;
    }
    out.gap_arc_um = 0.0;
    return out;
}

namespace detail {

inline int next_pow2(int v) {
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

// Fraction of a square cell covered by the disk, by 8x8 subsampling of cells
// that straddle the boundary.
inline double disk_coverage(double cx, double cy, double r, double x, double y, double dx, double dy) {
    const double dist = std::hypot(x - cx, y - cy);
    const double half_diag = 0.5 * std::hypot(dx, dy);
    if (dist <= r - half_diag) return 1.0;
    if (dist >= r + half_diag) return 0.0;
    int inside = 0;
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) {
            const double sx = x + ((a + 0.5) / 8.0 - 0.5) * dx;
            const double sy = y + ((b + 0.5) / 8.0 - 0.5) * dy;
            if (std::hypot(sx - cx, sy - cy) <= r) ++inside;
        }
    return inside / 64.0;
}

} // namespace detail

// Rasterises the lattice into an index map: window at least window_x by
// window_y, expanded so the grid is a power of two at exactly the requested
// resolution. Core boundary cells are area-weighted.
inline IndexMap rasterize(const Lattice& lattice, double resolution_um,
                          double window_x_um, double window_y_um,
                          BpmLayout layout = BpmLayout::FullRing) {
    if (!(resolution_um > 0.0)) throw std::domain_error("rasterize: resolution must be positive");
    for (const auto& s : lattice.sites)
        if (resolution_um > s.core.diameter_um / 8.0 + 1e-12)
            throw std::domain_error("rasterize: resolution must be <= diameter/8 (" +
                                    std::to_string(s.core.diameter_um / 8.0) + " um here)");

    const Lattice lat = (layout == BpmLayout::UnrolledLine) ? unroll_lattice(lattice) : lattice;

    IndexMap map;
    map.nx = detail::next_pow2(static_cast<int>(std::ceil(window_x_um / resolution_um - 1e-9)));
    map.ny = detail::next_pow2(static_cast<int>(std::ceil(window_y_um / resolution_um - 1e-9)));
    map.dx_um = resolution_um;
    map.dy_um = resolution_um;
    map.x0_um = -0.5 * map.nx * resolution_um;
    map.y0_um = -0.5 * map.ny * resolution_um;

    double clad = lat.sites.empty() ? 1.444 : lat.sites.front().core.clad_index;
    for (const auto& s : lat.sites)
        if (std::abs(s.core.clad_index - clad) > 1e-12)
            throw std::domain_error("rasterize: cores must share one cladding index");
    map.reference_index = clad;
    map.n.assign(static_cast<std::size_t>(map.nx) * map.ny, clad);

    for (const auto& s : lat.sites) {
        const double r = s.core.radius_um();
        if (std::abs(s.x_um) + r + 20.0 > 0.5 * map.window_x() ||
            std::abs(s.y_um) + r + 20.0 > 0.5 * map.window_y())
            throw geometry_error("rasterize: window too small for core at (" +
                                 std::to_string(s.x_um) + ", " + std::to_string(s.y_um) + ") um");
        const double dn = s.core.core_index() - clad;
        const int ix_lo = std::max(0, static_cast<int>((s.x_um - r - map.x0_um) / map.dx_um) - 1);
        const int ix_hi = std::min(map.nx - 1, static_cast<int>((s.x_um + r - map.x0_um) / map.dx_um) + 1);
        const int iy_lo = std::max(0, static_cast<int>((s.y_um - r - map.y0_um) / map.dy_um) - 1);
        const int iy_hi = std::min(map.ny - 1, static_cast<int>((s.y_um + r - map.y0_um) / map.dy_um) + 1);
        for (int iy = iy_lo; iy <= iy_hi; ++iy)
            for (int ix = ix_lo; ix <= ix_hi; ++ix) {
                const double cov = detail::disk_coverage(s.x_um, s.y_um, r, map.x_center(ix),
                                                         map.y_center(iy), map.dx_um, map.dy_um);
                if (cov > 0.0) map.n[static_cast<std::size_t>(iy) * map.nx + ix] += cov * dn;
            }
    }
    return map;
}

// Cached radial samples of an LP01 profile for the grid-sized loops. Linear
// interpolation on a uniform grid; zero beyond r_max.
class RadialProfile {
public:
    RadialProfile(const ModeSolution& m, double r_max_um, int samples = 8192)
        : r_max_(r_max_um), inv_dr_((samples - 1) / r_max_um), v_(samples) {
        for (int i = 0; i < samples; ++i)
            v_[i] = m.field_at(r_max_um * i / (samples - 1));
    }

    double operator()(double r) const {
        if (r >= r_max_) return 0.0;
        const double t = r * inv_dr_;
        const int i = static_cast<int>(t);
        const double f = t - i;
        return v_[i] * (1.0 - f) + v_[i + 1] * f;
    }

private:
    double r_max_;
    double inv_dr_;
    std::vector<double> v_;
};

// The launch field: site's normalised LP01 centered on the site, discretised
// on the map grid with unit discrete power.
inline ScalarField2D launch_field(const Lattice& lattice, std::size_t site_index,
                                  const IndexMap& map, double wavelength_um) {
    if (site_index >= lattice.size()) throw std::domain_error("launch_field: site index out of range");
    const LatticeSite& site = lattice.sites[site_index];
    const ModeSolution m = solve_lp01(site.core, wavelength_um);
    const double r_max = std::hypot(map.window_x(), map.window_y());
    const RadialProfile prof(m, r_max);

    ScalarField2D f;
    f.nx = map.nx;
    f.ny = map.ny;
    f.dx_um = map.dx_um;
    f.dy_um = map.dy_um;
    f.x0_um = map.x0_um;
    f.y0_um = map.y0_um;
    f.z_um = 0.0;
    f.e.resize(map.n.size());
    for (int iy = 0; iy < map.ny; ++iy) {
        const double y = map.y_center(iy) - site.y_um;
        for (int ix = 0; ix < map.nx; ++ix) {
            const double x = map.x_center(ix) - site.x_um;
            f.e[static_cast<std::size_t>(iy) * map.nx + ix] = prof(std::hypot(x, y));
        }
    }
    const double p = f.power();
    if (!(p > 0.0)) throw numeric_error("launch_field: discretised mode has zero power");
    const double scale = 1.0 / std::sqrt(p);
    for (auto& v : f.e) v *= scale;
    return f;
}

enum class FftPlanEffort {
    Estimate,  // deterministic plan choice, bit-reproducible across runs
    Measure,   // several times faster on large grids; plan may vary run to run
};

struct BpmOptions {
    bool absorber_enabled = true;
    double absorber_fraction = 0.10;  // of window width, per edge
    double absorber_strength = 1.0;   // peak amplitude decay exponent per step
    int absorber_order = 4;           // super-Gaussian order
    double alias_warn = 1e-6;         // band-edge spectral energy fraction
    double alias_error = 1e-4;
    FftPlanEffort plan_effort = FftPlanEffort::Estimate;
};

struct BpmRunStats {
    int steps = 0;
    double max_band_edge_fraction = 0.0;
    bool alias_warned = false;
};

namespace detail {

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftwPlans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::complex<double>* buf = nullptr;
    std::size_t size = 0;

    FftwPlans(int nx, int ny, unsigned flags) : size(static_cast<std::size_t>(nx) * ny) {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        buf = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * size));
        if (!buf) throw std::bad_alloc();
        auto* b = reinterpret_cast<fftw_complex*>(buf);
        // Row-major (ny, nx): iy is the slow index, matching ix + nx*iy.
        // Planning may scribble on the buffer, so plans are made before the
        // input is copied in.
        fwd = fftw_plan_dft_2d(ny, nx, b, b, FFTW_FORWARD, flags);
        bwd = fftw_plan_dft_2d(ny, nx, b, b, FFTW_BACKWARD, flags);
        if (!fwd || !bwd) throw numeric_error("FFTW plan creation failed");
    }
    ~FftwPlans() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
    FftwPlans(const FftwPlans&) = delete;
    FftwPlans& operator=(const FftwPlans&) = delete;
};

inline std::vector<double> fft_wavenumbers(int n, double d) {
    std::vector<double> k(static_cast<std::size_t>(n));
    const double dk = 2.0 * std::numbers::pi / (n * d);
    for (int i = 0; i < n; ++i) k[static_cast<std::size_t>(i)] = dk * (i <= n / 2 ? i : i - n);
    return k;
}

} // namespace detail

// Symmetric split-step spectral propagation: half diffraction, refraction
// (with the absorbing mask folded in), half diffraction per step; interior
// full steps fuse the adjacent half diffractions. Snapshots are appended
// every `snapshot_every` steps plus z = 0 and the final plane.
inline std::vector<ScalarField2D> propagate(const IndexMap& map, const ScalarField2D& input,
                                            double z_max_um, double dz_um, int snapshot_every,
                                            const BpmOptions& opts = {}, double wavelength_um = 1.55,
                                            BpmRunStats* stats_out = nullptr) {
    if (!(dz_um > 0.0) || dz_um > 1.0 + 1e-12)
        throw std::domain_error("propagate: dz must be in (0, 1] um");
    if (input.nx != map.nx || input.ny != map.ny ||
        std::abs(input.dx_um - map.dx_um) > 1e-12 || std::abs(input.dy_um - map.dy_um) > 1e-12)
        throw std::domain_error("propagate: input grid does not match the index map");
    if (z_max_um < 0.0) throw std::domain_error("propagate: negative distance");
    if (snapshot_every < 1) snapshot_every = 1;

    std::vector<ScalarField2D> snaps;
    snaps.push_back(input);
    if (z_max_um == 0.0) return snaps;

    const int nsteps = std::max(1, static_cast<int>(std::ceil(z_max_um / dz_um - 1e-9)));
    const double dz = z_max_um / nsteps;
    const double k0 = wavenumber(wavelength_um);
    const double n0 = map.reference_index;
    const std::size_t ncell = map.n.size();

    // Real-space multiplier: refraction phase times the absorber mask.
    std::vector<std::complex<double>> realmul(ncell);
    {
        std::vector<double> mask_x(static_cast<std::size_t>(map.nx), 1.0);
        std::vector<double> mask_y(static_cast<std::size_t>(map.ny), 1.0);
        if (opts.absorber_enabled) {
            auto fill = [&](std::vector<double>& mask, int n, double window) {
                const double width = opts.absorber_fraction * window;
                for (int i = 0; i < n; ++i) {
                    const double pos = (i + 0.5) * window / n;
                    const double depth = std::max(width - pos, pos - (window - width));
                    if (depth > 0.0)
                        mask[static_cast<std::size_t>(i)] =
                            std::exp(-opts.absorber_strength * std::pow(depth / width, opts.absorber_order));
                }
            };
            fill(mask_x, map.nx, map.window_x());
            fill(mask_y, map.ny, map.window_y());
        }
        for (int iy = 0; iy < map.ny; ++iy)
            for (int ix = 0; ix < map.nx; ++ix) {
                const std::size_t idx = static_cast<std::size_t>(iy) * map.nx + ix;
                const double phase = k0 * (map.n[idx] - n0) * dz;
                realmul[idx] = std::polar(mask_x[static_cast<std::size_t>(ix)] * mask_y[static_cast<std::size_t>(iy)], phase);
            }
    }

    // Spectral multipliers for half and full diffraction steps, with the
    // inverse-FFT 1/N folded in.
    const auto kx = detail::fft_wavenumbers(map.nx, map.dx_um);
    const auto ky = detail::fft_wavenumbers(map.ny, map.dy_um);
    const double inv_n = 1.0 / static_cast<double>(ncell);
    std::vector<std::complex<double>> half_kernel(ncell), full_kernel(ncell);
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix) {
            const std::size_t idx = static_cast<std::size_t>(iy) * map.nx + ix;
            const double k2 = kx[static_cast<std::size_t>(ix)] * kx[static_cast<std::size_t>(ix)] +
                              ky[static_cast<std::size_t>(iy)] * ky[static_cast<std::size_t>(iy)];
            half_kernel[idx] = std::polar(inv_n, -k2 * dz / (4.0 * k0 * n0));
            full_kernel[idx] = std::polar(inv_n, -k2 * dz / (2.0 * k0 * n0));
        }

    detail::FftwPlans plans(map.nx, map.ny,
                            opts.plan_effort == FftPlanEffort::Measure ? FFTW_MEASURE : FFTW_ESTIMATE);
    std::complex<double>* buf = plans.buf;
    std::memcpy(buf, input.e.data(), ncell * sizeof(std::complex<double>));

    BpmRunStats stats;
    auto check_alias = [&]() {
        // Spectral energy on the outermost wavenumber row/column vs total.
        double edge = 0.0, total = 0.0;
        const int ex = map.nx / 2;
        const int ey = map.ny / 2;
        for (int iy = 0; iy < map.ny; ++iy)
            for (int ix = 0; ix < map.nx; ++ix) {
                const double p = std::norm(buf[static_cast<std::size_t>(iy) * map.nx + ix]);
                total += p;
                if (ix == ex || iy == ey) edge += p;
            }
        if (total <= 0.0) return;
        const double frac = edge / total;
        stats.max_band_edge_fraction = std::max(stats.max_band_edge_fraction, frac);
        if (frac > opts.alias_error)
            throw numeric_error("propagate: spectral energy at band edge (" + std::to_string(frac) +
                                ") exceeds the aliasing limit");
        if (frac > opts.alias_warn && !stats.alias_warned) {
            stats.alias_warned = true;
            std::cerr << "fiberwalk: warning: band-edge spectral energy " << frac
                      << " exceeds " << opts.alias_warn << " (grid too coarse for this field)\n";
        }
    };

    auto apply = [&](const std::vector<std::complex<double>>& mul) {
        for (std::size_t i = 0; i < ncell; ++i) buf[i] *= mul[i];
    };
    auto record = [&](int step) {
        ScalarField2D snap;
        snap.nx = map.nx;
        snap.ny = map.ny;
        snap.dx_um = map.dx_um;
        snap.dy_um = map.dy_um;
        snap.x0_um = map.x0_um;
        snap.y0_um = map.y0_um;
        snap.z_um = step * dz;
        snap.e.assign(buf, buf + ncell);
        snaps.push_back(std::move(snap));
    };

    // Segment between recorded planes: Dh R (D R)^(m-1) Dh.
    int step = 0;
    while (step < nsteps) {
        const int seg = std::min(snapshot_every, nsteps - step);
        fftw_execute(plans.fwd);
        check_alias();
        apply(half_kernel);
        fftw_execute(plans.bwd);
        for (int k = 0; k < seg; ++k) {
            apply(realmul);
            if (k + 1 < seg) {
                fftw_execute(plans.fwd);
                apply(full_kernel);
                fftw_execute(plans.bwd);
            }
        }
        fftw_execute(plans.fwd);
        check_alias();
        apply(half_kernel);
        fftw_execute(plans.bwd);
        step += seg;
        record(step);
    }
    stats.steps = nsteps;
    if (stats_out) *stats_out = stats;
    return snaps;
}

// Per-core powers from the final field. Returns the renormalised
// distribution together with the raw captured fraction.
struct CorePowers {
    Distribution distribution;
    double captured_fraction = 0.0;
};

enum class ExtractionBasis {
    Projection,  // P_n = |<phi_n, E>|^2, direct mode projection
    Lowdin,      // amplitudes in the orthogonalised basis, S^(-1/2) <phi, E>
};

// Pairwise LP01 overlap matrix of the lattice sites. At low V the
// neighbouring modes are far from orthogonal (s ~ 0.6 for the species-B
// pitch), which the Lowdin extraction and Hamiltonian correction consume.
inline Eigen::MatrixXd lattice_overlap_matrix(const Lattice& lattice, double wavelength_um) {
    const auto n = static_cast<Eigen::Index>(lattice.size());
    using CoreKey = std::tuple<double, double, double>;
    std::map<CoreKey, ModeSolution> modes;
    auto mode_of = [&](const CoreSpec& c) -> const ModeSolution& {
        const CoreKey key{c.diameter_um, c.delta_n, c.clad_index};
        auto it = modes.find(key);
        if (it == modes.end()) it = modes.emplace(key, solve_lp01(c, wavelength_um)).first;
        return it->second;
    };
    std::map<std::tuple<CoreKey, CoreKey, double>, double> cache;
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const CoreSpec& ca = lattice.sites[static_cast<std::size_t>(i)].core;
            const CoreSpec& cb = lattice.sites[static_cast<std::size_t>(j)].core;
            CoreKey ka{ca.diameter_um, ca.delta_n, ca.clad_index};
            CoreKey kb{cb.diameter_um, cb.delta_n, cb.clad_index};
            if (kb < ka) std::swap(ka, kb);
            const double sep =
                std::round(lattice.separation_um(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * 1e6) / 1e6;
            const auto key = std::make_tuple(ka, kb, sep);
            auto it = cache.find(key);
            if (it == cache.end()) {
                const double tail = std::min(mode_of(ca).tail_rate(), mode_of(cb).tail_rate());
                // Overlaps below ~1e-8 cannot matter; skip the quadrature.
                const double val = (tail * sep > 25.0) ? 0.0 : mode_overlap(mode_of(ca), mode_of(cb), sep);
                it = cache.emplace(key, val).first;
            }
            s(i, j) = s(j, i) = it->second;
        }
    return s;
}

inline CorePowers extract_core_powers(const ScalarField2D& field, const Lattice& lattice,
                                      double wavelength_um,
                                      ExtractionBasis basis = ExtractionBasis::Projection) {
    if (lattice.size() == 0) throw std::domain_error("extract_core_powers: empty lattice");
    if (!(field.power() > 0.0)) throw std::domain_error("extract_core_powers: zero field");

    using CoreKey = std::tuple<double, double, double>;
    std::map<CoreKey, std::pair<ModeSolution, RadialProfile>> cache;
    const double r_max = std::hypot(field.nx * field.dx_um, field.ny * field.dy_um);

    Eigen::VectorXcd overlaps(static_cast<Eigen::Index>(lattice.size()));
    const double da = field.cell_area();
    for (std::size_t n = 0; n < lattice.size(); ++n) {
        const CoreSpec& c = lattice.sites[n].core;
        const CoreKey key{c.diameter_um, c.delta_n, c.clad_index};
        auto it = cache.find(key);
        if (it == cache.end()) {
            ModeSolution m = solve_lp01(c, wavelength_um);
            it = cache.emplace(key, std::make_pair(m, RadialProfile(m, r_max))).first;
        }
        const RadialProfile& prof = it->second.second;
        const double cx = lattice.sites[n].x_um;
        const double cy = lattice.sites[n].y_um;
        std::complex<double> overlap = 0.0;
        for (int iy = 0; iy < field.ny; ++iy) {
            const double y = field.y0_um + (iy + 0.5) * field.dy_um - cy;
            const std::complex<double>* row = field.e.data() + static_cast<std::size_t>(iy) * field.nx;
            for (int ix = 0; ix < field.nx; ++ix) {
                const double x = field.x0_um + (ix + 0.5) * field.dx_um - cx;
                overlap += prof(std::hypot(x, y)) * row[ix];
            }
        }
        overlaps[static_cast<Eigen::Index>(n)] = overlap * da;
    }

    if (basis == ExtractionBasis::Lowdin) {
        const Eigen::MatrixXd s = lattice_overlap_matrix(lattice, wavelength_um);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < 1e-6)
            throw numeric_error("extract_core_powers: overlap matrix is not safely positive definite");
        overlaps = (es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                    es.eigenvectors().transpose())
                       .cast<std::complex<double>>() *
                   overlaps;
    }

    CorePowers out;
    out.distribution.z_um = field.z_um;
    out.distribution.wavelength_um = wavelength_um;
    out.distribution.p.resize(lattice.size());
    double raw_sum = 0.0;
    for (std::size_t n = 0; n < lattice.size(); ++n) {
        const double p = std::norm(overlaps[static_cast<Eigen::Index>(n)]);
        out.distribution.p[n] = p;
        raw_sum += p;
    }
    if (!(raw_sum > 0.0)) throw std::domain_error("extract_core_powers: no power in any core mode");
    out.captured_fraction = raw_sum;
    if (out.captured_fraction < 0.5)
        std::cerr << "fiberwalk: warning: captured fraction " << out.captured_fraction
                  << " < 0.5 (field mostly radiated)\n";
    for (double& v : out.distribution.p) v /= raw_sum;
    return out;
}

// Gaussian test beam of the given waist, unit discrete power.
inline ScalarField2D make_gaussian(const IndexMap& map, double waist_um,
                                   double cx_um = 0.0, double cy_um = 0.0) {
    ScalarField2D f;
    f.nx = map.nx;
    f.ny = map.ny;
    f.dx_um = map.dx_um;
    f.dy_um = map.dy_um;
    f.x0_um = map.x0_um;
    f.y0_um = map.y0_um;
    f.e.resize(map.n.size());
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix) {
            const double x = map.x_center(ix) - cx_um;
            const double y = map.y_center(iy) - cy_um;
            f.e[static_cast<std::size_t>(iy) * map.nx + ix] =
                std::exp(-(x * x + y * y) / (waist_um * waist_um));
        }
    const double s = 1.0 / std::sqrt(f.power());
    for (auto& v : f.e) v *= s;
    return f;
}

// 1/e^2 intensity radius from the second moment: <r^2> = w^2/2 for an
// intensity profile exp(-2 r^2 / w^2).
inline double gaussian_width(const ScalarField2D& f) {
    double m0 = 0.0, mx = 0.0, my = 0.0;
    for (int iy = 0; iy < f.ny; ++iy)
        for (int ix = 0; ix < f.nx; ++ix) {
            const double x = f.x0_um + (ix + 0.5) * f.dx_um;
            const double y = f.y0_um + (iy + 0.5) * f.dy_um;
            const double p = std::norm(f.e[static_cast<std::size_t>(iy) * f.nx + ix]);
            m0 += p;
            mx += p * x * x;
            my += p * y * y;
        }
    return std::sqrt(2.0 * (mx + my) / m0);
}

// Binary grid dump: 32-byte header (magic "FWBF", u32 nx, u32 ny, f32 dx,
// f32 dy, f64 z, u32 reserved), then row-major little-endian (re, im) f64
// pairs.
inline void write_field_dump(const std::string& path, const ScalarField2D& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const char magic[4] = {'F', 'W', 'B', 'F'};
    out.write(magic, 4);
    const std::uint32_t nx = static_cast<std::uint32_t>(f.nx);
    const std::uint32_t ny = static_cast<std::uint32_t>(f.ny);
    const float dx = static_cast<float>(f.dx_um);
    const float dy = static_cast<float>(f.dy_um);
    const double z = f.z_um;
    const std::uint32_t reserved = 0;
    out.write(reinterpret_cast<const char*>(&nx), 4);
    out.write(reinterpret_cast<const char*>(&ny), 4);
    out.write(reinterpret_cast<const char*>(&dx), 4);
    out.write(reinterpret_cast<const char*>(&dy), 4);
    out.write(reinterpret_cast<const char*>(&z), 8);
    out.write(reinterpret_cast<const char*>(&reserved), 4);
    out.write(reinterpret_cast<const char*>(f.e.data()),
              static_cast<std::streamsize>(f.e.size() * sizeof(std::complex<double>)));
}

} // namespace fiberwalk
