#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fiberwalk/errors.hpp"
#include "fiberwalk/rng.hpp"
#include "fiberwalk/sequences.hpp"

namespace fiberwalk {

// Golden ratio, the spacing ratio of Fibonacci-spaced lattices.
inline constexpr double kGoldenRatio = 1.6180339887498948482;

// One step-index waveguide. Lengths in micrometres throughout.
struct CoreSpec {
    Species label = Species::B;
    double diameter_um = 4.5;
    double delta_n = 0.0035;    // n_core - n_clad
    double clad_index = 1.444;  // fused silica near 1.55 um

    double core_index() const { return clad_index + delta_n; }
    double radius_um() const { return 0.5 * diameter_um; }

    void validate() const {
        if (!(diameter_um > 0.0)) throw std::domain_error("CoreSpec: diameter must be positive");
        if (!(delta_n > 0.0 && delta_n < 0.1)) throw std::domain_error("CoreSpec: delta_n must be in (0, 0.1)");
        if (!(clad_index > 1.0)) throw std::domain_error("CoreSpec: clad_index must exceed 1");
    }
};

using SpeciesMap = std::map<Species, CoreSpec>;

inline SpeciesMap default_species() {
    SpeciesMap m;
    m[Species::A] = CoreSpec{Species::A, 4.5, 0.0045, 1.444};
    m[Species::B] = CoreSpec{Species::B, 4.5, 0.0035, 1.444};
    return m;
}

struct LatticeSite {
    double x_um = 0.0;
    double y_um = 0.0;
    CoreSpec core;
};

enum class GeometryKind { Ring, Line };

// Positioned cores plus the metadata both engines need. For a ring the sites
// lie on the circle of radius ring_radius_um, equally spaced by arc `pitch_um`
// and centered so the middle site sits at angle 0; the residual arc between
// the two end cores is gap_arc_um. For a line sites lie on the x axis and
// gap_arc_um is zero.
struct Lattice {
    GeometryKind geometry = GeometryKind::Ring;
    std::vector<LatticeSite> sites;
    std::optional<double> ring_radius_um;
    std::optional<double> clad_radius_um;
    std::size_t center_index = 0;
    double pitch_um = 0.0;
    double gap_arc_um = 0.0;

    std::size_t size() const { return sites.size(); }

    // Centre-to-centre distance between two sites (chord distance on a ring).
    double separation_um(std::size_t i, std::size_t j) const {
        const double dx = sites[i].x_um - sites[j].x_um;
        const double dy = sites[i].y_um - sites[j].y_um;
        return std::hypot(dx, dy);
    }

    // Coordinate along the core line: arc length on a ring (signed, zero at
    // the center site), plain x on a line. Used by the unrolled BPM layout.
    double arc_coordinate_um(std::size_t i) const {
        if (geometry == GeometryKind::Line) return sites[i].x_um;
        const double r = *ring_radius_um;
        const double theta = std::atan2(sites[i].y_um, sites[i].x_um);
        return r * theta;
    }
};

// Equal-arc placement of a species word on a ring of radius ring_radius_um.
// The middle letter sits at angle 0; gap_arc_um is what remains of the
// circumference after the (N-1) occupied pitches, so end cores are always
// farther apart than neighbours when the precondition holds.
inline Lattice build_ring_lattice(const SequenceWord& word, const SpeciesMap& specs,
                                  double ring_radius_um, double pitch_um,
                                  std::optional<double> clad_radius_um = std::nullopt) {
    const std::size_t n = word.size();
    if (n == 0) throw std::domain_error("build_ring_lattice: empty word");
    if (n % 2 == 0) throw std::domain_error("build_ring_lattice: word length must be odd (no central core otherwise)");
    if (!(ring_radius_um > 0.0) || !(pitch_um > 0.0))
        throw std::domain_error("build_ring_lattice: radius and pitch must be positive");
    const double circumference = 2.0 * std::numbers::pi * ring_radius_um;
    if (static_cast<double>(n) * pitch_um >= circumference)
        throw geometry_error("build_ring_lattice: word does not fit on the ring (no end gap would remain)");

    Lattice lat;
    lat.geometry = GeometryKind::Ring;
    lat.ring_radius_um = ring_radius_um;
    lat.clad_radius_um = clad_radius_um;
    lat.pitch_um = pitch_um;
    lat.center_index = (n - 1) / 2;
    lat.gap_arc_um = circumference - static_cast<double>(n - 1) * pitch_um;
    lat.sites.reserve(n);
    const double dtheta = pitch_um / ring_radius_um;
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = specs.find(word.letters[i]);
        if (it == specs.end()) throw std::domain_error("build_ring_lattice: word references an undefined species");
        it->second.validate();
        const double theta = (static_cast<double>(i) - static_cast<double>(lat.center_index)) * dtheta;
        lat.sites.push_back({ring_radius_um * std::cos(theta), ring_radius_um * std::sin(theta), it->second});
    }
    // Neighbour clearance: arc pitch must exceed the largest diameter.
    double max_d = 0.0;
    for (const auto& s : lat.sites) max_d = std::max(max_d, s.core.diameter_um);
    if (n > 1 && lat.separation_um(0, 1) < max_d)
        throw geometry_error("build_ring_lattice: cores overlap at this pitch");
    return lat;
}

// Identical cores on a straight line with gaps drawn from the Fibonacci
// element of the given order, letters mapped to spacings {1, golden ratio}
// times unit_spacing_um. All propagation constants equal; only the couplings
// are quasiperiodic.
inline Lattice fss_lattice(int order, double unit_spacing_um,
                           const CoreSpec& core = CoreSpec{}) {
    if (order < 1) throw std::domain_error("fss_lattice: order must be >= 1");
    if (!(unit_spacing_um > 0.0)) throw std::domain_error("fss_lattice: unit spacing must be positive");
    core.validate();
    if (unit_spacing_um < core.diameter_um)
        throw geometry_error("fss_lattice: unit spacing below the core diameter (cores would overlap)");
    const SequenceWord gaps = fibonacci_element(order);

    Lattice lat;
    lat.geometry = GeometryKind::Line;
    lat.pitch_um = unit_spacing_um;
    lat.gap_arc_um = 0.0;
    lat.sites.reserve(gaps.size() + 1);
    double x = 0.0;
    lat.sites.push_back({x, 0.0, core});
    for (Species g : gaps.letters) {
        x += (g == Species::A ? 1.0 : kGoldenRatio) * unit_spacing_um;
        lat.sites.push_back({x, 0.0, core});
    }
    lat.center_index = lat.sites.size() / 2;
    // Shift so the launch core sits at x = 0.
    const double x0 = lat.sites[lat.center_index].x_um;
    for (auto& s : lat.sites) s.x_um -= x0;
    return lat;
}

// Multiplies every core diameter by an independent uniform factor in
// [1 - jitter, 1 + jitter] drawn from a SplitMix64 stream. Positions are
// untouched; the same seed reproduces the same lattice.
inline Lattice perturb_lattice(const Lattice& lattice, double diameter_jitter_fraction,
                               std::uint64_t seed) {
    if (!(diameter_jitter_fraction >= 0.0 && diameter_jitter_fraction < 0.5))
        throw std::domain_error("perturb_lattice: jitter must be in [0, 0.5)");
    if (diameter_jitter_fraction == 0.0) return lattice;
    Lattice out = lattice;
    SplitMix64 rng(seed);
    for (auto& site : out.sites) {
        const double f = rng.next_uniform(1.0 - diameter_jitter_fraction, 1.0 + diameter_jitter_fraction);
        site.core.diameter_um *= f;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lattice text format: the file contract between the lattice builder and both
// engines. Header lines `key value`, then one CSV record per site:
//   index,x_um,y_um,species,diameter_um,delta_n,clad_index
// ---------------------------------------------------------------------------

namespace detail {
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace detail

inline std::string serialize_lattice(const Lattice& lat) {
    std::ostringstream os;
    os << "fiberwalk-lattice 1\n";
    os << "geometry " << (lat.geometry == GeometryKind::Ring ? "ring" : "line") << "\n";
    if (lat.ring_radius_um) os << "ring_radius_um " << detail::fmt_g17(*lat.ring_radius_um) << "\n";
    if (lat.clad_radius_um) os << "clad_radius_um " << detail::fmt_g17(*lat.clad_radius_um) << "\n";
    os << "pitch_um " << detail::fmt_g17(lat.pitch_um) << "\n";
    os << "center_index " << lat.center_index << "\n";
    os << "sites " << lat.sites.size() << "\n";
    for (std::size_t i = 0; i < lat.sites.size(); ++i) {
        const auto& s = lat.sites[i];
        os << i << ',' << detail::fmt_g17(s.x_um) << ',' << detail::fmt_g17(s.y_um) << ','
           << species_char(s.core.label) << ',' << detail::fmt_g17(s.core.diameter_um) << ','
           << detail::fmt_g17(s.core.delta_n) << ',' << detail::fmt_g17(s.core.clad_index) << "\n";
    }
    return os.str();
}

inline Lattice parse_lattice(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    if (!next_line() || line.rfind("fiberwalk-lattice", 0) != 0)
        throw parse_error("not a fiberwalk lattice file", lineno);

    Lattice lat;
    std::size_t n_sites = 0;
    bool have_sites = false;
    while (!have_sites && next_line()) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "geometry") {
            std::string g;
            ls >> g;
            if (g == "ring") lat.geometry = GeometryKind::Ring;
            else if (g == "line") lat.geometry = GeometryKind::Line;
            else throw parse_error("unknown geometry '" + g + "'", lineno);
        } else if (key == "ring_radius_um") {
            double v; ls >> v; lat.ring_radius_um = v;
        } else if (key == "clad_radius_um") {
            double v; ls >> v; lat.clad_radius_um = v;
        } else if (key == "pitch_um") {
            ls >> lat.pitch_um;
        } else if (key == "center_index") {
            ls >> lat.center_index;
        } else if (key == "sites") {
            ls >> n_sites;
            have_sites = true;
        } else {
            throw parse_error("unknown lattice header key '" + key + "'", lineno);
        }
        if (ls.fail()) throw parse_error("malformed header line", lineno);
    }
    if (!have_sites) throw parse_error("lattice file missing site count", lineno);

    lat.sites.reserve(n_sites);
    for (std::size_t i = 0; i < n_sites; ++i) {
        if (!next_line()) throw parse_error("lattice file truncated: expected " + std::to_string(n_sites) + " site records", lineno);
        std::istringstream ls(line);
        std::string field;
        auto next_field = [&]() {
            if (!std::getline(ls, field, ',')) throw parse_error("short site record", lineno);
            return field;
        };
        const std::size_t idx = std::stoul(next_field());
        if (idx != i) throw parse_error("site indices out of order", lineno);
        LatticeSite s;
        s.x_um = std::stod(next_field());
        s.y_um = std::stod(next_field());
        s.core.label = species_from_char(next_field().at(0));
        s.core.diameter_um = std::stod(next_field());
        s.core.delta_n = std::stod(next_field());
        s.core.clad_index = std::stod(next_field());
        s.core.validate();
        lat.sites.push_back(s);
    }
    if (lat.center_index >= lat.sites.size())
        throw parse_error("center_index out of range");
    if (lat.geometry == GeometryKind::Ring) {
        if (!lat.ring_radius_um) throw parse_error("ring lattice missing ring_radius_um");
        lat.gap_arc_um = 2.0 * std::numbers::pi * *lat.ring_radius_um -
                         static_cast<double>(lat.sites.size() - 1) * lat.pitch_um;
    }
    return lat;
}

inline void save_lattice(const Lattice& lat, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << serialize_lattice(lat);
}

inline Lattice load_lattice(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open lattice file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_lattice(ss.str());
}

} // namespace fiberwalk
