#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fiberwalk/errors.hpp"

namespace fiberwalk {

// Per-core probabilities at one propagation distance.
struct Distribution {
    std::vector<double> p;
    double z_um = 0.0;
    double wavelength_um = 0.0;

    std::size_t size() const { return p.size(); }

    double sum() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }
};

// Snapshot series CSV: header `z_um,site_0,...`, one row per snapshot.
// Shared schema between the CMT and BPM engines.
inline void write_snapshot_series_csv(const std::string& path,
                                      const std::vector<Distribution>& snapshots) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    if (snapshots.empty()) throw std::domain_error("write_snapshot_series_csv: no snapshots");
    f << "z_um";
    for (std::size_t n = 0; n < snapshots.front().size(); ++n) f << ",site_" << n;
    f << "\n";
    char buf[40];
    for (const auto& d : snapshots) {
        std::snprintf(buf, sizeof buf, "%.12g", d.z_um);
        f << buf;
        for (double v : d.p) {
            std::snprintf(buf, sizeof buf, "%.12g", v);
            f << ',' << buf;
        }
        f << "\n";
    }
}

// Final-profile CSV: one row per site.
inline void write_profile_csv(const std::string& path, const Distribution& d) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "site,probability\n";
    char buf[40];
    for (std::size_t n = 0; n < d.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%.12g", d.p[n]);
        f << n << ',' << buf << "\n";
    }
}

// Reads a snapshot series CSV back; inverse of write_snapshot_series_csv.
inline std::vector<Distribution> read_snapshot_series_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw parse_error("empty CSV: " + path, 1);
    std::vector<Distribution> out;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        Distribution d;
        std::size_t pos = 0;
        bool first = true;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            const std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            try {
                if (first) d.z_um = std::stod(field);
                else d.p.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw parse_error("bad number '" + field + "' in " + path, lineno);
            }
            first = false;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace fiberwalk
