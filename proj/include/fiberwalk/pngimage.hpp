#pragma once

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "fiberwalk/distribution.hpp"

namespace fiberwalk {

namespace detail {

inline void png_write_chunk(std::ofstream& out, const char type[4], const std::vector<std::uint8_t>& data) {
    auto be32 = [](std::uint32_t v) {
        return std::array<std::uint8_t, 4>{static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                                           static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
    };
    const auto len = be32(static_cast<std::uint32_t>(data.size()));
    out.write(reinterpret_cast<const char*>(len.data()), 4);
    out.write(type, 4);
    if (!data.empty()) out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
    if (!data.empty()) crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
    const auto crcb = be32(crc);
    out.write(reinterpret_cast<const char*>(crcb.data()), 4);
}

} // namespace detail

// Writes an 8-bit RGB PNG (zlib-deflated, filter 0 rows).
inline void write_png(const std::string& path, int width, int height,
                      const std::vector<std::uint8_t>& rgb) {
    if (width <= 0 || height <= 0 || rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw std::domain_error("write_png: bad image dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<std::uint8_t> ihdr(13);
    auto put32 = [&](std::size_t at, std::uint32_t v) {
        ihdr[at] = static_cast<std::uint8_t>(v >> 24);
        ihdr[at + 1] = static_cast<std::uint8_t>(v >> 16);
        ihdr[at + 2] = static_cast<std::uint8_t>(v >> 8);
        ihdr[at + 3] = static_cast<std::uint8_t>(v);
    };
    put32(0, static_cast<std::uint32_t>(width));
    put32(4, static_cast<std::uint32_t>(height));
    ihdr[8] = 8;   // bit depth
    ihdr[9] = 2;   // RGB
    ihdr[10] = ihdr[11] = ihdr[12] = 0;
    detail::png_write_chunk(out, "IHDR", ihdr);

    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (static_cast<std::size_t>(width) * 3 + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);  // filter none
        const auto* row = rgb.data() + static_cast<std::size_t>(y) * width * 3;
        raw.insert(raw.end(), row, row + static_cast<std::size_t>(width) * 3);
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(bound);
    if (compress2(packed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw std::runtime_error("write_png: deflate failed");
    packed.resize(bound);
    detail::png_write_chunk(out, "IDAT", packed);
    detail::png_write_chunk(out, "IEND", {});
}

// Dark-blue through orange to near-white intensity ramp.
inline std::array<std::uint8_t, 3> heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    static const double anchors[6][3] = {{0.05, 0.03, 0.25}, {0.25, 0.05, 0.45}, {0.60, 0.10, 0.38},
                                         {0.90, 0.35, 0.15}, {0.98, 0.70, 0.20}, {0.99, 0.95, 0.75}};
    const double pos = t * 5.0;
    const int i = std::min(4, static_cast<int>(pos));
    const double f = pos - i;
    std::array<std::uint8_t, 3> c;
    for (int k = 0; k < 3; ++k)
        c[static_cast<std::size_t>(k)] =
            static_cast<std::uint8_t>(std::lround(255.0 * (anchors[i][k] * (1.0 - f) + anchors[i + 1][k] * f)));
    return c;
}

// Heatmap of a snapshot series: z runs top to bottom, site index left to
// right, colour encodes P_n normalised to the global maximum.
inline void write_heatmap_png(const std::string& path, const std::vector<Distribution>& snapshots) {
    if (snapshots.empty()) throw std::domain_error("write_heatmap_png: no snapshots");
    const int n_sites = static_cast<int>(snapshots.front().size());
    const int n_rows = static_cast<int>(snapshots.size());
    const int cw = std::clamp(640 / std::max(1, n_sites), 1, 16);
    const int ch = std::clamp(480 / std::max(1, n_rows), 1, 16);
    const int width = n_sites * cw;
    const int height = n_rows * ch;

    double pmax = 0.0;
    for (const auto& d : snapshots)
        for (double v : d.p) pmax = std::max(pmax, v);
    if (pmax <= 0.0) pmax = 1.0;

    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3);
    for (int r = 0; r < n_rows; ++r) {
        const auto& d = snapshots[static_cast<std::size_t>(r)];
        for (int s = 0; s < n_sites; ++s) {
            const auto c = heat_color(d.p[static_cast<std::size_t>(s)] / pmax);
            for (int yy = 0; yy < ch; ++yy)
                for (int xx = 0; xx < cw; ++xx) {
                    const std::size_t px = (static_cast<std::size_t>(r * ch + yy) * width + s * cw + xx) * 3;
                    rgb[px] = c[0];
                    rgb[px + 1] = c[1];
                    rgb[px + 2] = c[2];
                }
        }
    }
    write_png(path, width, height, rgb);
}

} // namespace fiberwalk
