#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fiberwalk/bpm.hpp"

using namespace fiberwalk;

namespace {

constexpr double kLambda = 1.55;
const CoreSpec kSpeciesB{Species::B, 4.5, 0.0035, 1.444};
// Well-confined test guide: V = 1.70, tail decay length 2.4 um. Used where a
// compact mode is needed so that neighbour overlaps are genuinely small.
const CoreSpec kStrong{Species::B, 4.5, 0.012, 1.444};

Lattice line_pair(const CoreSpec& c, double separation) {
    Lattice lat;
    lat.geometry = GeometryKind::Line;
    lat.sites.push_back({-0.5 * separation, 0.0, c});
    lat.sites.push_back({0.5 * separation, 0.0, c});
    lat.center_index = 0;
    lat.pitch_um = separation;
    return lat;
}

Lattice single_core(const CoreSpec& c) {
    Lattice lat;
    lat.geometry = GeometryKind::Line;
    lat.sites.push_back({0.0, 0.0, c});
    lat.center_index = 0;
    lat.pitch_um = 1.0;
    return lat;
}

} // namespace

TEST_CASE("rasterize fills an empty lattice with cladding") {
    Lattice empty;
    empty.geometry = GeometryKind::Line;
    const IndexMap map = rasterize(empty, 0.5, 100.0, 60.0);
    CHECK(map.nx == 256);
    CHECK(map.ny == 128);
    for (double v : map.n) CHECK(v == 1.444);
}

TEST_CASE("rasterized core area matches the disk") {
    const IndexMap map = rasterize(single_core(kSpeciesB), 0.25, 80.0, 80.0);
    const double dn = kSpeciesB.delta_n;
    double covered = 0.0;
    for (double v : map.n) covered += (v - 1.444) / dn;
    const double area = covered * map.dx_um * map.dy_um;
    const double want = std::numbers::pi * 2.25 * 2.25;
    CHECK(area == Approx(want).epsilon(0.02));
    CHECK(*std::min_element(map.n.begin(), map.n.end()) >= 1.444);
    CHECK(*std::max_element(map.n.begin(), map.n.end()) <= kSpeciesB.core_index() + 1e-12);
}

TEST_CASE("rasterize grid dimensions are powers of two") {
    const IndexMap map = rasterize(single_core(kSpeciesB), 0.5, 100.0, 70.0);
    CHECK((map.nx & (map.nx - 1)) == 0);
    CHECK((map.ny & (map.ny - 1)) == 0);
    CHECK(map.dx_um == 0.5);
    CHECK(map.window_x() >= 100.0);
}

TEST_CASE("rasterize rejects tight windows and coarse grids") {
    CHECK_THROWS_AS(rasterize(single_core(kSpeciesB), 0.5, 30.0, 30.0), geometry_error);
    CHECK_THROWS_AS(rasterize(single_core(kSpeciesB), 0.7, 100.0, 100.0), std::domain_error);
}

TEST_CASE("unrolling maps ring arcs onto a line") {
    const Lattice ring = build_ring_lattice(periodic_word(13), default_species(), 120.0, 16.89);
    const Lattice line = unroll_lattice(ring);
    CHECK(line.geometry == GeometryKind::Line);
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        CHECK(line.sites[i + 1].x_um - line.sites[i].x_um == Approx(16.89).margin(1e-9));
        CHECK(line.sites[i].y_um == 0.0);
    }
    CHECK(line.sites[line.center_index].x_um == Approx(0.0).margin(1e-9));
}

TEST_CASE("launch field has unit power and matches its continuous profile") {
    const Lattice lat = single_core(kSpeciesB);
    const IndexMap map = rasterize(lat, 0.25, 120.0, 120.0);
    const ScalarField2D f = launch_field(lat, 0, map, kLambda);
    CHECK(f.power() == Approx(1.0).margin(1e-6));

    const ModeSolution m = solve_lp01(kSpeciesB, kLambda);
    double dot = 0.0, norm_cont = 0.0;
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix) {
            const double cont = m.field_at(std::hypot(map.x_center(ix), map.y_center(iy)));
            dot += cont * f.e[static_cast<std::size_t>(iy) * map.nx + ix].real();
            norm_cont += cont * cont;
        }
    const double overlap = dot * std::sqrt(map.dx_um * map.dy_um / norm_cont);
    CHECK(overlap >= 0.999);
}

TEST_CASE("neighbour-mode overlap is small for well-confined guides") {
    const ModeSolution m = solve_lp01(kStrong, kLambda);
    CHECK(std::abs(mode_overlap(m, m, 16.89)) <= 0.05);
    // the paper's weakly guiding species B is a different story
    const ModeSolution mb = solve_lp01(kSpeciesB, kLambda);
    CHECK(mode_overlap(mb, mb, 16.89) == Approx(0.602).margin(0.005));
}

TEST_CASE("extraction returns a delta for an exact well-separated mode") {
    const Lattice lat = line_pair(kStrong, 40.0);
    const IndexMap map = rasterize(lat, 0.5, 160.0, 100.0);
    const ScalarField2D f = launch_field(lat, 0, map, kLambda);
    const CorePowers cp = extract_core_powers(f, lat, kLambda);
    CHECK(cp.distribution.p[0] >= 0.999);
    CHECK(cp.distribution.p[1] <= 1e-3);
    CHECK(cp.captured_fraction == Approx(1.0).margin(0.02));
}

TEST_CASE("an equal superposition of distant cores splits fifty-fifty") {
    const Lattice lat = line_pair(kStrong, 60.0);
    const IndexMap map = rasterize(lat, 0.5, 200.0, 100.0);
    const ScalarField2D f0 = launch_field(lat, 0, map, kLambda);
    const ScalarField2D f1 = launch_field(lat, 1, map, kLambda);
    ScalarField2D mix = f0;
    for (std::size_t i = 0; i < mix.e.size(); ++i) mix.e[i] = (f0.e[i] + f1.e[i]) / std::sqrt(2.0);
    const CorePowers cp = extract_core_powers(mix, lat, kLambda);
    CHECK(cp.distribution.p[0] == Approx(0.5).margin(1e-3));
    CHECK(cp.distribution.p[1] == Approx(0.5).margin(1e-3));
}

TEST_CASE("extraction rejects a zero field") {
    const Lattice lat = single_core(kStrong);
    const IndexMap map = rasterize(lat, 0.5, 100.0, 100.0);
    ScalarField2D zero;
    zero.nx = map.nx;
    zero.ny = map.ny;
    zero.dx_um = map.dx_um;
    zero.dy_um = map.dy_um;
    zero.x0_um = map.x0_um;
    zero.y0_um = map.y0_um;
    zero.e.assign(map.n.size(), 0.0);
    CHECK_THROWS_AS(extract_core_powers(zero, lat, kLambda), std::domain_error);
}

TEST_CASE("zero-distance propagation returns the input bitwise") {
    const Lattice lat = single_core(kSpeciesB);
    const IndexMap map = rasterize(lat, 0.5, 100.0, 100.0);
    const ScalarField2D f = launch_field(lat, 0, map, kLambda);
    const auto snaps = propagate(map, f, 0.0, 0.5, 10, {}, kLambda);
    REQUIRE(snaps.size() == 1);
    CHECK(snaps[0].e == f.e);
}

TEST_CASE("propagate validates step size and grid compatibility") {
    const Lattice lat = single_core(kSpeciesB);
    const IndexMap map = rasterize(lat, 0.5, 100.0, 100.0);
    const ScalarField2D f = launch_field(lat, 0, map, kLambda);
    CHECK_THROWS_AS(propagate(map, f, 100.0, 1.5, 10, {}, kLambda), std::domain_error);
    CHECK_THROWS_AS(propagate(map, f, 100.0, -0.5, 10, {}, kLambda), std::domain_error);
    const IndexMap other = rasterize(lat, 0.5, 200.0, 100.0);
    CHECK_THROWS_AS(propagate(other, f, 100.0, 0.5, 10, {}, kLambda), std::domain_error);
}

TEST_CASE("free-space Gaussian spreads by the analytic width law") {
    Lattice empty;
    empty.geometry = GeometryKind::Line;
    const IndexMap map = rasterize(empty, 0.5, 192.0, 192.0);
    const double w0 = 6.0;
    const double zr = std::numbers::pi * w0 * w0 * map.reference_index / kLambda;
    const ScalarField2D g = make_gaussian(map, w0);
    CHECK(gaussian_width(g) == Approx(w0).epsilon(0.005));
    const auto snaps = propagate(map, g, 2.0 * zr, 0.5, 1 << 30, {}, kLambda);
    const double want = w0 * std::sqrt(1.0 + 4.0);
    CHECK(gaussian_width(snaps.back()) == Approx(want).epsilon(0.01));
}

TEST_CASE("interior power is conserved without the absorber") {
    const Lattice lat = line_pair(kStrong, 12.0);
    const IndexMap map = rasterize(lat, 0.5, 128.0, 128.0);
    BpmOptions opts;
    opts.absorber_enabled = false;
    const ScalarField2D f = launch_field(lat, 0, map, kLambda);
    const auto snaps = propagate(map, f, 1000.0, 1.0, 1 << 30, opts, kLambda);
    CHECK(std::abs(snaps.back().power() - f.power()) < 1e-6);
}

TEST_CASE("band-edge energy trips the aliasing guard") {
    Lattice empty;
    empty.geometry = GeometryKind::Line;
    const IndexMap map = rasterize(empty, 0.5, 64.0, 64.0);
    ScalarField2D f = make_gaussian(map, 10.0);
    // Nyquist checkerboard: all spectral weight at the band edge.
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix)
            f.e[static_cast<std::size_t>(iy) * map.nx + ix] = ((ix + iy) % 2 == 0) ? 1.0 : -1.0;
    CHECK_THROWS_AS(propagate(map, f, 10.0, 0.5, 1, {}, kLambda), numeric_error);
}

TEST_CASE("field dumps carry the 32-byte header and full grid") {
    const Lattice lat = single_core(kStrong);
    const IndexMap map = rasterize(lat, 0.5, 100.0, 100.0);
    const ScalarField2D f = launch_field(lat, 0, map, kLambda);
    const std::string path = "test_field_dump.bin";
    write_field_dump(path, f);
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    char magic[4];
    std::uint32_t nx = 0, ny = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&nx), 4);
    in.read(reinterpret_cast<char*>(&ny), 4);
    CHECK(std::string(magic, 4) == "FWBF");
    CHECK(nx == static_cast<std::uint32_t>(map.nx));
    CHECK(ny == static_cast<std::uint32_t>(map.ny));
    in.seekg(0, std::ios::end);
    CHECK(static_cast<std::size_t>(in.tellg()) == 32 + f.e.size() * 16);
    std::remove(path.c_str());
}
