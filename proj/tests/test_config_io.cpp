#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fiberwalk/config.hpp"
#include "fiberwalk/pngimage.hpp"
#include "fiberwalk/runner.hpp"

using namespace fiberwalk;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const char* kSmallConfig = R"(
# tiny walk for io tests
seed = 11

[lattice]
kind = "ring"
sequence = "periodic"
count = 5
ring_radius_um = 120.0
pitch_um = 16.89

[engine]
type = "cmt"
wavelength_um = 1.55
z_max_um = 4000.0
snapshots = 9

[output]
dir = "PLACEHOLDER"
)";

RunConfig small_config(const std::string& outdir) {
    std::string text = kSmallConfig;
    text.replace(text.find("PLACEHOLDER"), 11, outdir);
    return parse_run_config(TomlTable::parse(text));
}

} // namespace

TEST_CASE("toml subset parses sections, strings, numbers and booleans") {
    const TomlTable t = TomlTable::parse(
        "top = 3\n"
        "[a]\n"
        "name = \"hello # not a comment\"  # trailing comment\n"
        "x = 1.5e-3\n"
        "flag = true\n"
        "[a.b]\n"
        "y = -7\n");
    CHECK(t.get_int("top", 0) == 3);
    CHECK(t.get_string("a.name", "") == "hello # not a comment");
    CHECK(t.get_double("a.x", 0.0) == Approx(1.5e-3));
    CHECK(t.get_bool("a.flag", false));
    CHECK(t.get_int("a.b.y", 0) == -7);
}

TEST_CASE("toml parser reports malformed lines with their numbers") {
    auto expect_line = [](const char* text, int line) {
        try {
            TomlTable::parse(text);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == line);
        }
    };
    expect_line("x = 1\nbroken line\n", 2);
    expect_line("[unclosed\n", 1);
    expect_line("x = \"no end\n", 1);
    expect_line("x = 1\nx = 2\n", 2);
    // bare words parse as raw text; the typed getter rejects them
    const TomlTable t = TomlTable::parse("x = not_a_number\n");
    CHECK_THROWS_AS(t.get_double("x", 0.0), parse_error);
}

TEST_CASE("toml serialisation round-trips semantically") {
    const char* text =
        "z = 4\n"
        "[b]\n"
        "s = \"quo\\\"te\"\n"
        "[a]\n"
        "x = 1.25\n";
    const TomlTable t1 = TomlTable::parse(text);
    const std::string canon = t1.serialize();
    const TomlTable t2 = TomlTable::parse(canon);
    CHECK(t2.serialize() == canon);
    CHECK(t2.get_string("b.s", "") == "quo\"te");
    CHECK(t2.get_double("a.x", 0.0) == 1.25);
    CHECK(t2.get_int("z", 0) == 4);
}

TEST_CASE("unknown config keys are rejected with their location") {
    const std::string text = "[lattice]\nkind = \"ring\"\nbogus_knob = 3\n";
    try {
        parse_run_config(TomlTable::parse(text));
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(std::string(e.what()).find("bogus_knob") != std::string::npos);
        CHECK(e.line() == 3);
    }
}

TEST_CASE("config validation rejects bad enums and species") {
    CHECK_THROWS_AS(parse_run_config(TomlTable::parse("[lattice]\nkind = \"torus\"\n")), parse_error);
    CHECK_THROWS_AS(parse_run_config(TomlTable::parse("[engine]\ntype = \"fdtd\"\n")), parse_error);
    CHECK_THROWS_AS(parse_run_config(TomlTable::parse("[species.B]\ndelta_n = 0.5\n")), parse_error);
    CHECK_THROWS_AS(parse_run_config(TomlTable::parse("[engine]\nz_max_um = -1.0\n")), parse_error);
}

TEST_CASE("even core counts cannot form a centred ring") {
    const RunConfig c = parse_run_config(TomlTable::parse("[lattice]\ncount = 4\n"));
    CHECK_THROWS_AS(build_lattice_from_config(c), std::domain_error);
}

TEST_CASE("sweep defaults cover the C-band protocol") {
    const RunConfig c = parse_run_config(TomlTable::parse(""));
    CHECK(c.lambda_start_um == Approx(1.530));
    CHECK(c.lambda_end_um == Approx(1.559));
    CHECK(c.sweep_steps == 30);
    CHECK(c.walk.wavelength_um == Approx(1.55));
}

TEST_CASE("zero-distance walks emit the launch delta") {
    const auto tmp = std::filesystem::temp_directory_path() / "fiberwalk_z0_test";
    std::filesystem::remove_all(tmp);
    RunConfig c = small_config((tmp / "z0").string());
    c.walk.z_max_um = 0.0;
    cmd_walk(c);
    const auto snaps = read_snapshot_series_csv((tmp / "z0" / "snapshots.csv").string());
    REQUIRE(snaps.size() == 1);
    CHECK(snaps[0].z_um == 0.0);
    for (std::size_t i = 0; i < snaps[0].size(); ++i)
        CHECK(snaps[0].p[i] == (i == 2 ? 1.0 : 0.0));  // 5-core ring, centre 2
    CHECK(std::filesystem::exists(tmp / "z0" / "heatmap.png"));
    std::filesystem::remove_all(tmp);
}

TEST_CASE("config hash tracks content and seed") {
    RunConfig a = small_config("out1");
    RunConfig b = small_config("out1");
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 12;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("bundled reference configs parse and build") {
    const std::filesystem::path configs = std::filesystem::path(FIBERWALK_SOURCE_DIR) / "configs";
    for (const char* name : {"mcrf13", "mcrf23", "mcrf39", "fmcrf4", "fmcrf5", "fmcrf6", "fss7"}) {
        INFO(name);
        const RunConfig c = load_run_config((configs / (std::string(name) + ".toml")).string());
        const Lattice lat = build_lattice_from_config(c);
        CHECK(lat.size() >= 2);
        if (std::string(name) == "mcrf39" || std::string(name) == "fmcrf6") CHECK(lat.size() == 39);
        if (std::string(name) == "fmcrf4") CHECK(lat.size() == 13);
        if (std::string(name) == "fmcrf5") CHECK(lat.size() == 23);
    }
}

TEST_CASE("walk command writes the advertised files deterministically") {
    const auto tmp = std::filesystem::temp_directory_path() / "fiberwalk_io_test";
    std::filesystem::remove_all(tmp);
    const RunConfig c1 = small_config((tmp / "run1").string());
    const RunConfig c2 = small_config((tmp / "run2").string());
    cmd_walk(c1);
    cmd_walk(c2);
    for (const char* name : {"snapshots.csv", "final_profile.csv", "lattice.txt"}) {
        INFO(name);
        CHECK(read_file(tmp / "run1" / name) == read_file(tmp / "run2" / name));
    }
    CHECK(std::filesystem::exists(tmp / "run1" / "heatmap.png"));
    CHECK(std::filesystem::exists(tmp / "run1" / "metrics.json"));

    // every emitted file appears in the manifest
    const std::string manifest = read_file(tmp / "run1" / "manifest.json");
    for (const auto& entry : std::filesystem::directory_iterator(tmp / "run1")) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue;
        INFO(name);
        CHECK(manifest.find('"' + name + '"') != std::string::npos);
    }
    std::filesystem::remove_all(tmp);
}

TEST_CASE("analyze reproduces metrics from stored snapshots") {
    const auto tmp = std::filesystem::temp_directory_path() / "fiberwalk_analyze_test";
    std::filesystem::remove_all(tmp);
    const RunConfig c = small_config((tmp / "walk").string());
    cmd_walk(c);
    // analyzing the same stored distribution twice is bit-identical
    RunConfig ca = c;
    ca.output_dir = (tmp / "analysis1").string();
    cmd_analyze(ca, (tmp / "walk" / "snapshots.csv").string());
    ca.output_dir = (tmp / "analysis2").string();
    cmd_analyze(ca, (tmp / "walk" / "snapshots.csv").string());
    CHECK(read_file(tmp / "analysis1" / "metrics.json") == read_file(tmp / "analysis2" / "metrics.json"));
    CHECK(read_file(tmp / "analysis1" / "metrics.txt") == read_file(tmp / "analysis2" / "metrics.txt"));
    // and agrees with the in-memory metrics to the 12-digit CSV precision
    const auto jw = nlohmann::json::parse(read_file(tmp / "walk" / "metrics.json"));
    const auto ja = nlohmann::json::parse(read_file(tmp / "analysis1" / "metrics.json"));
    for (const char* key : {"participation_ratio", "variance", "center_probability"})
        CHECK(ja[key].get<double>() == Approx(jw[key].get<double>()).epsilon(1e-10));
    std::filesystem::remove_all(tmp);
}

TEST_CASE("snapshot csv round-trips") {
    std::vector<Distribution> snaps;
    for (int k = 0; k < 3; ++k) {
        Distribution d;
        d.z_um = 100.0 * k;
        d.p = {0.25, 0.5, 0.25};
        snaps.push_back(d);
    }
    const std::string path = "test_snapshots_roundtrip.csv";
    write_snapshot_series_csv(path, snaps);
    const auto back = read_snapshot_series_csv(path);
    REQUIRE(back.size() == 3);
    CHECK(back[1].z_um == 100.0);
    CHECK(back[2].p == snaps[2].p);
    std::remove(path.c_str());
}

TEST_CASE("png writer emits a valid signature and geometry") {
    std::vector<Distribution> snaps(4);
    for (auto& d : snaps) d.p = {0.1, 0.2, 0.3, 0.4};
    const std::string path = "test_heatmap.png";
    write_heatmap_png(path, snaps);
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    unsigned char sig[8];
    f.read(reinterpret_cast<char*>(sig), 8);
    const unsigned char want[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    CHECK(std::equal(sig, sig + 8, want));
    f.seekg(16);  // IHDR width field
    unsigned char wh[8];
    f.read(reinterpret_cast<char*>(wh), 8);
    const auto be32 = [](const unsigned char* p) {
        return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) | p[3];
    };
    CHECK(be32(wh) % 4 == 0);   // width: 4 sites
    CHECK(be32(wh + 4) % 4 == 0);  // height: 4 rows
    CHECK(be32(wh) > 0);
    std::remove(path.c_str());
}
