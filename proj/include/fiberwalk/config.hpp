#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "fiberwalk/errors.hpp"
#include "fiberwalk/lattice.hpp"
#include "fiberwalk/walks.hpp"

namespace fiberwalk {

// ---------------------------------------------------------------------------
// Minimal TOML subset: [section] / [a.b] tables, `key = value` pairs with
// string, integer, float and boolean values, and # comments. Enough for flat
// experiment configs while staying hand-checkable.
// ---------------------------------------------------------------------------

struct TomlValue {
    std::string text;  // raw value text (strings unquoted)
    bool quoted = false;
    int line = 0;
};

class TomlTable {
public:
    static TomlTable parse(const std::string& text) {
        TomlTable t;
        std::istringstream is(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']') throw parse_error("unterminated table header", lineno);
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty()) throw parse_error("empty table name", lineno);
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw parse_error("expected `key = value`", lineno);
            const std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty()) throw parse_error("empty key", lineno);
            if (val.empty()) throw parse_error("empty value for key '" + key + "'", lineno);
            TomlValue v;
            v.line = lineno;
            if (val.front() == '"') {
                if (val.size() < 2 || val.back() != '"')
                    throw parse_error("unterminated string for key '" + key + "'", lineno);
                v.text = unescape(val.substr(1, val.size() - 2), lineno);
                v.quoted = true;
            } else {
                v.text = val;
            }
            const std::string full = section.empty() ? key : section + "." + key;
            if (t.values_.count(full)) throw parse_error("duplicate key '" + full + "'", lineno);
            t.values_[full] = v;
        }
        return t;
    }

    static TomlTable parse_file(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open config: " + path);
        std::ostringstream ss;
        ss << f.rdbuf();
        try {
            return parse(ss.str());
        } catch (const parse_error& e) {
            throw parse_error(path + ": " + e.what());
        }
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(key);
        return it->second.text;
    }

    std::string require_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw parse_error("missing required key '" + key + "'");
        consumed_.insert(key);
        return it->second.text;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(key);
        return to_double(it->first, it->second);
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(key);
        const double d = to_double(it->first, it->second);
        const auto v = static_cast<std::int64_t>(d);
        if (static_cast<double>(v) != d)
            throw parse_error("key '" + key + "' must be an integer", it->second.line);
        return v;
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(key);
        try {
            return std::stoull(it->second.text);
        } catch (const std::exception&) {
            throw parse_error("key '" + key + "' must be a non-negative integer", it->second.line);
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(key);
        if (it->second.text == "true") return true;
        if (it->second.text == "false") return false;
        throw parse_error("key '" + key + "' must be true or false", it->second.line);
    }

    int line_of(const std::string& key) const {
        auto it = values_.find(key);
        return it == values_.end() ? 0 : it->second.line;
    }

    // Any key never touched by a getter is a config typo; report the first
    // with its line number.
    void check_all_consumed() const {
        for (const auto& [key, val] : values_) {
            if (!consumed_.count(key))
                throw parse_error("unknown config key '" + key + "'", val.line);
        }
    }

    // Canonical serialisation: sections sorted, keys sorted within them.
    std::string serialize() const {
        std::map<std::string, std::map<std::string, const TomlValue*>> sections;
        for (const auto& [full, val] : values_) {
            const auto dot = full.rfind('.');
            const std::string sec = dot == std::string::npos ? "" : full.substr(0, dot);
            const std::string key = dot == std::string::npos ? full : full.substr(dot + 1);
            sections[sec][key] = &val;
        }
        std::ostringstream os;
        for (const auto& [sec, keys] : sections) {
            if (!sec.empty()) os << "[" << sec << "]\n";
            for (const auto& [key, val] : keys) {
                os << key << " = ";
                if (val->quoted) os << '"' << escape(val->text) << '"';
                else os << val->text;
                os << "\n";
            }
        }
        return os.str();
    }

private:
    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }
    static std::string strip_comment(const std::string& s) {
        bool in_str = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
            if (s[i] == '#' && !in_str) return s.substr(0, i);
        }
        return s;
    }
    static std::string unescape(const std::string& s, int lineno) {
        std::string out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '\\') {
                if (i + 1 >= s.size()) throw parse_error("dangling escape in string", lineno);
                const char c = s[++i];
                if (c == '"') out.push_back('"');
                else if (c == '\\') out.push_back('\\');
                else throw parse_error(std::string("unsupported escape \\") + c, lineno);
            } else {
                out.push_back(s[i]);
            }
        }
        return out;
    }
    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        return out;
    }
    static double to_double(const std::string& key, const TomlValue& v) {
        try {
            std::size_t used = 0;
            const double d = std::stod(v.text, &used);
            if (used != v.text.size()) throw std::invalid_argument("trailing text");
            return d;
        } catch (const std::exception&) {
            throw parse_error("key '" + key + "' must be a number (got '" + v.text + "')", v.line);
        }
    }

    std::map<std::string, TomlValue> values_;
    mutable std::set<std::string> consumed_;
};

// ---------------------------------------------------------------------------
// RunConfig: a validated experiment description.
// ---------------------------------------------------------------------------

enum class LatticeKind { Ring, Fss };
enum class SequenceKind { Periodic, Fibonacci };

struct RunConfig {
    // lattice
    LatticeKind lattice_kind = LatticeKind::Ring;
    SequenceKind sequence = SequenceKind::Periodic;
    int count = 39;         // periodic
    int order = 6;          // fibonacci / fss
    ChainMode chain_mode = ChainMode::Palindromic;
    double ring_radius_um = 120.0;
    std::optional<double> clad_radius_um;
    double pitch_um = 16.89;
    double unit_spacing_um = 16.0;  // fss
    SpeciesMap species = default_species();

    // engine
    WalkParams walk;

    // sweep
    double lambda_start_um = 1.530;
    double lambda_end_um = 1.559;
    int sweep_steps = 30;

    // ensemble
    double jitter = 0.0;
    int members = 1;

    // run
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    std::string canonical_text;  // serialized form the hash is computed from
};

inline RunConfig parse_run_config(const TomlTable& t) {
    RunConfig c;

    const std::string kind = t.get_string("lattice.kind", "ring");
    if (kind == "ring") c.lattice_kind = LatticeKind::Ring;
    else if (kind == "fss") c.lattice_kind = LatticeKind::Fss;
    else throw parse_error("lattice.kind must be ring or fss", t.line_of("lattice.kind"));

    const std::string seq = t.get_string("lattice.sequence", "periodic");
    if (seq == "periodic") c.sequence = SequenceKind::Periodic;
    else if (seq == "fibonacci") c.sequence = SequenceKind::Fibonacci;
    else throw parse_error("lattice.sequence must be periodic or fibonacci", t.line_of("lattice.sequence"));

    c.count = static_cast<int>(t.get_int("lattice.count", c.count));
    c.order = static_cast<int>(t.get_int("lattice.order", c.order));
    const std::string mode = t.get_string("lattice.chain_mode", "palindromic");
    if (mode == "palindromic") c.chain_mode = ChainMode::Palindromic;
    else if (mode == "literal") c.chain_mode = ChainMode::Literal;
    else throw parse_error("lattice.chain_mode must be palindromic or literal", t.line_of("lattice.chain_mode"));
    c.ring_radius_um = t.get_double("lattice.ring_radius_um", c.ring_radius_um);
    if (t.has("lattice.clad_radius_um")) c.clad_radius_um = t.get_double("lattice.clad_radius_um", 0.0);
    c.pitch_um = t.get_double("lattice.pitch_um", c.pitch_um);
    c.unit_spacing_um = t.get_double("lattice.unit_spacing_um", c.unit_spacing_um);

    for (auto [label, name] : {std::pair{Species::A, "A"}, std::pair{Species::B, "B"}}) {
        const std::string base = std::string("species.") + name + ".";
        CoreSpec& spec = c.species[label];
        spec.label = label;
        spec.diameter_um = t.get_double(base + "diameter_um", spec.diameter_um);
        spec.delta_n = t.get_double(base + "delta_n", spec.delta_n);
        spec.clad_index = t.get_double(base + "clad_index", spec.clad_index);
        try {
            spec.validate();
        } catch (const std::exception& e) {
            throw parse_error(std::string("species.") + name + ": " + e.what());
        }
    }

    const std::string engine = t.get_string("engine.type", "cmt");
    if (engine == "cmt") c.walk.engine = EngineKind::Cmt;
    else if (engine == "bpm") c.walk.engine = EngineKind::Bpm;
    else throw parse_error("engine.type must be cmt or bpm", t.line_of("engine.type"));
    c.walk.wavelength_um = t.get_double("engine.wavelength_um", 1.55);
    c.walk.z_max_um = t.get_double("engine.z_max_um", 41000.0);
    if (c.walk.z_max_um < 0.0) throw parse_error("engine.z_max_um must be >= 0", t.line_of("engine.z_max_um"));
    c.walk.snapshots = static_cast<int>(t.get_int("engine.snapshots", 200));
    c.walk.hopts.kappa_cutoff = t.get_double("engine.kappa_cutoff", 1e-9);
    c.walk.hopts.nearest_neighbor_only = t.get_bool("engine.nearest_neighbor_only", false);
    const std::string corr = t.get_string("engine.correction", "none");
    if (corr == "none") c.walk.hopts.correction = OverlapCorrection::None;
    else if (corr == "pairwise") c.walk.hopts.correction = OverlapCorrection::Pairwise;
    else if (corr == "lowdin") c.walk.hopts.correction = OverlapCorrection::Lowdin;
    else throw parse_error("engine.correction must be none, pairwise or lowdin", t.line_of("engine.correction"));

    c.walk.bpm_resolution_um = t.get_double("bpm.resolution_um", 0.25);
    c.walk.bpm_dz_um = t.get_double("bpm.dz_um", 0.5);
    c.walk.bpm_window_x_um = t.get_double("bpm.window_x_um", 0.0);
    c.walk.bpm_window_y_um = t.get_double("bpm.window_y_um", 0.0);
    const std::string layout = t.get_string("bpm.layout", "unrolled_line");
    if (layout == "unrolled_line") c.walk.bpm_layout = BpmLayout::UnrolledLine;
    else if (layout == "full_ring") c.walk.bpm_layout = BpmLayout::FullRing;
    else throw parse_error("bpm.layout must be unrolled_line or full_ring", t.line_of("bpm.layout"));
    c.walk.bpm_opts.absorber_strength = t.get_double("bpm.absorber_strength", 1.0);
    c.walk.bpm_opts.absorber_fraction = t.get_double("bpm.absorber_fraction", 0.10);
    c.walk.bpm_opts.absorber_enabled = t.get_bool("bpm.absorber_enabled", true);
    const std::string plan = t.get_string("bpm.plan", "estimate");
    if (plan == "estimate") c.walk.bpm_opts.plan_effort = FftPlanEffort::Estimate;
    else if (plan == "measure") c.walk.bpm_opts.plan_effort = FftPlanEffort::Measure;
    else throw parse_error("bpm.plan must be estimate or measure", t.line_of("bpm.plan"));
    const std::string extraction = t.get_string("bpm.extraction", "projection");
    if (extraction == "projection") c.walk.extraction = ExtractionBasis::Projection;
    else if (extraction == "lowdin") c.walk.extraction = ExtractionBasis::Lowdin;
    else throw parse_error("bpm.extraction must be projection or lowdin", t.line_of("bpm.extraction"));

    c.lambda_start_um = t.get_double("sweep.lambda_start_um", c.lambda_start_um);
    c.lambda_end_um = t.get_double("sweep.lambda_end_um", c.lambda_end_um);
    c.sweep_steps = static_cast<int>(t.get_int("sweep.steps", c.sweep_steps));

    c.jitter = t.get_double("ensemble.jitter", 0.0);
    c.members = static_cast<int>(t.get_int("ensemble.members", 1));

    c.output_dir = t.get_string("output.dir", "out");
    c.seed = t.get_u64("seed", 1);

    t.check_all_consumed();
    c.canonical_text = t.serialize();
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    return parse_run_config(TomlTable::parse_file(path));
}

// Builds the configured lattice.
inline Lattice build_lattice_from_config(const RunConfig& c) {
    if (c.lattice_kind == LatticeKind::Fss)
        return fss_lattice(c.order, c.unit_spacing_um, c.species.at(Species::B));
    SequenceWord word = (c.sequence == SequenceKind::Periodic)
                            ? periodic_word(c.count)
                            : fibonacci_chain(c.order, c.chain_mode);
    return build_ring_lattice(word, c.species, c.ring_radius_um, c.pitch_um, c.clad_radius_um);
}

// FNV-1a over the canonical config text plus the effective seed.
inline std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
    };
    mix(c.canonical_text);
    mix("seed=" + std::to_string(c.seed));
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace fiberwalk
