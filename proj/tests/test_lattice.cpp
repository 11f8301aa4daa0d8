#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>

#include "fiberwalk/lattice.hpp"

using namespace fiberwalk;

TEST_CASE("ring embedding leaves the measured end gap") {
    const Lattice mcrf = build_ring_lattice(periodic_word(39), default_species(), 120.0, 16.89, 160.0);
    const double expected = 2.0 * std::numbers::pi * 120.0 - 38.0 * 16.89;
    CHECK(mcrf.gap_arc_um == Approx(expected).epsilon(1e-12));
    CHECK(mcrf.gap_arc_um == Approx(112.1).margin(0.1));
    CHECK(mcrf.gap_arc_um > mcrf.pitch_um);
    CHECK(mcrf.center_index == 19);

    const Lattice fm = build_ring_lattice(periodic_word(39), default_species(), 120.0, 16.80, 160.0);
    CHECK(fm.gap_arc_um == Approx(2.0 * std::numbers::pi * 120.0 - 38.0 * 16.80).epsilon(1e-12));
    CHECK(fm.gap_arc_um == Approx(115.6).margin(0.15));
}

TEST_CASE("single-site ring sits at angle zero") {
    const Lattice one = build_ring_lattice(periodic_word(1), default_species(), 120.0, 16.89);
    REQUIRE(one.size() == 1);
    CHECK(one.sites[0].x_um == Approx(120.0));
    CHECK(one.sites[0].y_um == Approx(0.0).margin(1e-12));
    CHECK(one.center_index == 0);
}

TEST_CASE("ring sites subtend equal arcs on the exact circle") {
    const Lattice lat = build_ring_lattice(fibonacci_chain(5, ChainMode::Palindromic),
                                           default_species(), 120.0, 16.80);
    const double dtheta = 16.80 / 120.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const auto& s = lat.sites[i];
        CHECK(std::hypot(s.x_um, s.y_um) == Approx(120.0).margin(1e-9));
        if (i > 0) {
            const double a0 = std::atan2(lat.sites[i - 1].y_um, lat.sites[i - 1].x_um);
            const double a1 = std::atan2(s.y_um, s.x_um);
            CHECK(a1 - a0 == Approx(dtheta).margin(1e-12));
        }
    }
    // middle letter at angle 0
    CHECK(lat.sites[lat.center_index].y_um == Approx(0.0).margin(1e-9));
    CHECK(lat.sites[lat.center_index].core.label == Species::A);
}

TEST_CASE("ring builder rejects bad geometry") {
    CHECK_THROWS_AS(build_ring_lattice(periodic_word(39), default_species(), 120.0, 20.0),
                    geometry_error);  // 39 * 20 > circumference
    CHECK_THROWS_AS(build_ring_lattice(periodic_word(39), default_species(), 120.0, 4.0),
                    geometry_error);  // pitch below the core diameter
}

TEST_CASE("even-length words cannot be centred") {
    SequenceWord w;
    w.letters.assign(4, Species::B);
    CHECK_THROWS_AS(build_ring_lattice(w, default_species(), 120.0, 16.89), std::domain_error);
}

TEST_CASE("fss lattice maps letters to golden-ratio gaps") {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    CHECK(kGoldenRatio == Approx(phi).epsilon(1e-12));
    CHECK(kGoldenRatio == Approx(1.618).margin(1e-3));

    const Lattice l3 = fss_lattice(3, 16.0);  // gap word "AB"
    REQUIRE(l3.size() == 3);
    CHECK(l3.sites[1].x_um - l3.sites[0].x_um == Approx(16.0).epsilon(1e-12));
    CHECK(l3.sites[2].x_um - l3.sites[1].x_um == Approx(16.0 * phi).epsilon(1e-12));
    CHECK(l3.sites[2].x_um - l3.sites[1].x_um == Approx(25.888).margin(1e-3));
    CHECK(l3.geometry == GeometryKind::Line);
    for (const auto& s : l3.sites) {
        CHECK(s.core.label == Species::B);
        CHECK(s.y_um == 0.0);
    }

    const Lattice l1 = fss_lattice(1, 16.0);  // single gap, two cores
    REQUIRE(l1.size() == 2);
    CHECK(l1.sites[1].x_um - l1.sites[0].x_um == Approx(16.0).epsilon(1e-12));

    CHECK_THROWS_AS(fss_lattice(0, 16.0), std::domain_error);
    CHECK_THROWS_AS(fss_lattice(3, -1.0), std::domain_error);
    CHECK_THROWS_AS(fss_lattice(3, 3.0), geometry_error);  // cores would overlap
}

TEST_CASE("perturbation is seeded, bounded and position-preserving") {
    const Lattice base = build_ring_lattice(fibonacci_chain(6, ChainMode::Palindromic),
                                            default_species(), 120.0, 16.80);
    SECTION("zero jitter is the identity") {
        const Lattice same = perturb_lattice(base, 0.0, 7);
        for (std::size_t i = 0; i < base.size(); ++i)
            CHECK(same.sites[i].core.diameter_um == base.sites[i].core.diameter_um);
    }
    SECTION("same seed reproduces the same lattice") {
        const Lattice a = perturb_lattice(base, 0.02, 7);
        const Lattice b = perturb_lattice(base, 0.02, 7);
        for (std::size_t i = 0; i < base.size(); ++i)
            CHECK(a.sites[i].core.diameter_um == b.sites[i].core.diameter_um);
    }
    SECTION("different seeds differ") {
        const Lattice a = perturb_lattice(base, 0.02, 7);
        const Lattice b = perturb_lattice(base, 0.02, 8);
        bool any_diff = false;
        for (std::size_t i = 0; i < base.size(); ++i)
            any_diff |= a.sites[i].core.diameter_um != b.sites[i].core.diameter_um;
        CHECK(any_diff);
    }
    SECTION("three-percent jitter stays within three percent") {
        for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
            const Lattice p = perturb_lattice(base, 0.03, seed);
            for (std::size_t i = 0; i < base.size(); ++i) {
                const double ratio = p.sites[i].core.diameter_um / base.sites[i].core.diameter_um;
                CHECK(ratio >= 0.97);
                CHECK(ratio <= 1.03);
                CHECK(p.sites[i].x_um == base.sites[i].x_um);
                CHECK(p.sites[i].y_um == base.sites[i].y_um);
            }
        }
    }
    SECTION("jitter of one half is out of domain") {
        CHECK_THROWS_AS(perturb_lattice(base, 0.5, 1), std::domain_error);
        CHECK_THROWS_AS(perturb_lattice(base, -0.1, 1), std::domain_error);
    }
}

TEST_CASE("lattice text format round-trips exactly") {
    Lattice lat = build_ring_lattice(fibonacci_chain(5, ChainMode::Palindromic), default_species(),
                                     120.0, 16.80, 160.0);
    lat = perturb_lattice(lat, 0.03, 42);  // exercise non-round diameters
    const std::string text = serialize_lattice(lat);
    const Lattice back = parse_lattice(text);
    REQUIRE(back.size() == lat.size());
    CHECK(back.geometry == lat.geometry);
    CHECK(*back.ring_radius_um == lat.ring_radius_um);
    CHECK(*back.clad_radius_um == lat.clad_radius_um);
    CHECK(back.pitch_um == lat.pitch_um);
    CHECK(back.center_index == lat.center_index);
    CHECK(back.gap_arc_um == Approx(lat.gap_arc_um).epsilon(1e-15));
    for (std::size_t i = 0; i < lat.size(); ++i) {
        CHECK(back.sites[i].x_um == lat.sites[i].x_um);
        CHECK(back.sites[i].y_um == lat.sites[i].y_um);
        CHECK(back.sites[i].core.label == lat.sites[i].core.label);
        CHECK(back.sites[i].core.diameter_um == lat.sites[i].core.diameter_um);
        CHECK(back.sites[i].core.delta_n == lat.sites[i].core.delta_n);
        CHECK(back.sites[i].core.clad_index == lat.sites[i].core.clad_index);
    }
    CHECK(serialize_lattice(back) == text);
}

TEST_CASE("core specs reject unphysical parameters") {
    CHECK_NOTHROW(CoreSpec{}.validate());
    CHECK_THROWS_AS((CoreSpec{Species::B, -1.0, 0.0035, 1.444}).validate(), std::domain_error);
    CHECK_THROWS_AS((CoreSpec{Species::B, 4.5, 0.0, 1.444}).validate(), std::domain_error);
    CHECK_THROWS_AS((CoreSpec{Species::B, 4.5, 0.2, 1.444}).validate(), std::domain_error);
    CHECK_THROWS_AS((CoreSpec{Species::B, 4.5, 0.0035, 0.9}).validate(), std::domain_error);
}

TEST_CASE("lattice parser reports malformed input") {
    CHECK_THROWS_AS(parse_lattice("not a lattice\n"), parse_error);
    CHECK_THROWS_AS(parse_lattice("fiberwalk-lattice 1\nbogus_key 3\nsites 0\n"), parse_error);
    const Lattice lat = fss_lattice(2, 16.0);
    std::string text = serialize_lattice(lat);
    text.resize(text.size() / 2);  // truncate mid-records
    CHECK_THROWS_AS(parse_lattice(text), parse_error);
}
