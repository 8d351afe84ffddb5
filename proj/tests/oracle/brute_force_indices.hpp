#pragma once

// Direct transcription of the Davies-Bouldin and silhouette formulas on plain
// nested vectors. Shares no code with the library; used as a test oracle.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

using Series = std::vector<std::vector<double>>;  // [time][dimension]
using Group = std::vector<Series>;

inline double dist(const Series& a, const Series& b) {
    double sum = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t)
        for (std::size_t d = 0; d < a[t].size(); ++d) sum += (a[t][d] - b[t][d]) * (a[t][d] - b[t][d]);
    return sum;
}

inline double R(const Series& y, const Group& members) {
    double sum = 0.0;
    for (const auto& x : members) sum += dist(y, x);
    return sum / static_cast<double>(members.size());
}

inline Series centroid(const Group& g) {
    Series m(g[0].size(), std::vector<double>(g[0][0].size(), 0.0));
    for (const auto& x : g)
        for (std::size_t t = 0; t < x.size(); ++t)
            for (std::size_t d = 0; d < x[t].size(); ++d) m[t][d] += x[t][d] / static_cast<double>(g.size());
    return m;
}

inline std::size_t medoid_position(const Group& g) {
    std::size_t best = 0;
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < g.size(); ++c) {
        double sum = 0.0;
        for (std::size_t u = 0; u < g.size(); ++u) sum += dist(g[u], g[c]);
        if (sum < best_sum) {
            best_sum = sum;
            best = c;
        }
    }
    return best;
}

inline double davies_bouldin(const std::vector<Group>& groups, bool use_medoid) {
    const std::size_t k = groups.size();
    std::vector<Series> m;
    for (const auto& g : groups) m.push_back(use_medoid ? g[medoid_position(g)] : centroid(g));
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            const double sep = dist(m[i], m[j]);
            if (sep == 0.0) return std::numeric_limits<double>::infinity();
            worst = std::max(worst, (R(m[i], groups[i]) + R(m[j], groups[j])) / sep);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

inline double silhouette(const std::vector<Group>& groups) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        Group others;
        for (std::size_t j = 0; j < groups.size(); ++j)
            if (j != i) others.insert(others.end(), groups[j].begin(), groups[j].end());
        for (const auto& x : groups[i]) {
            const double a = R(x, groups[i]);
            const double b = R(x, others);
            const double denom = std::max(a, b);
            total += denom == 0.0 ? 0.0 : (b - a) / denom;
            ++count;
        }
    }
    return 1.0 - total / static_cast<double>(count);
}

}  // namespace oracle
