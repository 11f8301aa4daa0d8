#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fiberwalk/cmt.hpp"
#include "fiberwalk/distribution.hpp"

namespace fiberwalk {

// Effective number of occupied sites, 1/sum(P^2). 1 for a delta
// distribution, N for a uniform one; small values signal localization.
inline double participation_ratio(const Distribution& d) {
    double s2 = 0.0;
    for (double v : d.p) s2 += v * v;
    if (s2 <= 0.0) throw std::domain_error("participation_ratio: empty distribution");
    return 1.0 / s2;
}

struct WalkMetrics {
    double participation_ratio = 0.0;
    double variance = 0.0;  // second moment about the launch site, site^2
    int peak_index = 0;
    double center_probability = 0.0;
    double symmetry_error = 0.0;  // half the L1 distance to the mirrored distribution
    std::optional<std::pair<int, int>> ballistic_lobes;
};

// Local maxima of P (plateau-tolerant at the left edge of a flat top);
// endpoints count.
inline std::vector<int> local_maxima(const std::vector<double>& p) {
    std::vector<int> out;
    const int n = static_cast<int>(p.size());
    for (int i = 0; i < n; ++i) {
        const bool left_ok = (i == 0) || p[i] > p[i - 1];
        const bool right_ok = (i == n - 1) || p[i] >= p[i + 1];
        if (left_ok && right_ok) out.push_back(i);
    }
    return out;
}

// Ballistic-lobe rule: the outermost local maxima on each side, reported only
// when both exceed the centre probability.
inline WalkMetrics walk_metrics(const Distribution& d, std::size_t center) {
    const std::size_t n = d.size();
    if (center >= n) throw std::domain_error("walk_metrics: center out of range");
    WalkMetrics m;
    m.participation_ratio = participation_ratio(d);
    m.center_probability = d.p[center];
    double var = 0.0;
    int peak = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double off = static_cast<double>(i) - static_cast<double>(center);
        var += d.p[i] * off * off;
        if (d.p[i] > d.p[static_cast<std::size_t>(peak)]) peak = static_cast<int>(i);
    }
    m.variance = var;
    m.peak_index = peak;
    double sym = 0.0;
    for (std::size_t i = 0; i < n; ++i) sym += std::abs(d.p[i] - d.p[n - 1 - i]);
    m.symmetry_error = 0.5 * sym;

    const auto maxima = local_maxima(d.p);
    if (!maxima.empty()) {
        const int lo = maxima.front();
        const int hi = maxima.back();
        if (lo != hi && d.p[static_cast<std::size_t>(lo)] > m.center_probability &&
            d.p[static_cast<std::size_t>(hi)] > m.center_probability)
            m.ballistic_lobes = std::make_pair(lo, hi);
    }
    return m;
}

// Bhattacharyya fidelity (sum of sqrt(P*Q))^2, in [0, 1]; 1 iff P = Q.
inline double compare_distributions(const Distribution& p, const Distribution& q) {
    if (p.size() != q.size())
        throw std::domain_error("compare_distributions: length mismatch");
    double b = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) b += std::sqrt(p.p[i] * q.p[i]);
    return b * b;
}

// Pointwise mean of normalised distributions, renormalised.
inline Distribution mean_distribution(const std::vector<Distribution>& members) {
    if (members.empty()) throw std::domain_error("mean_distribution: no members");
    Distribution out;
    out.z_um = members.front().z_um;
    out.wavelength_um = members.front().wavelength_um;
    out.p.assign(members.front().size(), 0.0);
    for (const auto& d : members) {
        if (d.size() != out.size()) throw std::domain_error("mean_distribution: length mismatch");
        for (std::size_t i = 0; i < d.size(); ++i) out.p[i] += d.p[i];
    }
    double total = 0.0;
    for (double& v : out.p) total += v;
    for (double& v : out.p) v /= total;
    return out;
}

} // namespace fiberwalk
