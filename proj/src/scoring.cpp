#include "genmotif/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace genmotif {

double sq_euclidean(const Segment& x, const Segment& y) {
    if (!x.same_shape(y)) throw std::invalid_argument("sq_euclidean: segment shapes differ");
    const auto a = x.values();
    const auto b = y.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

DissimilarityMeasure squared_euclidean() {
    return {"sqeuclidean", &sq_euclidean};
}

DissimilarityMeasure dissimilarity_by_name(const std::string& name) {
    if (name == "sqeuclidean") return squared_euclidean();
    throw std::invalid_argument("unknown dissimilarity '" + name + "'");
}

std::string to_string(ValidityIndex index) {
    return index == ValidityIndex::davies_bouldin ? "db" : "silhouette";
}

std::string to_string(Representative rep) {
    return rep == Representative::mean ? "mean" : "medoid";
}

ValidityIndex parse_validity_index(const std::string& name) {
    if (name == "db") return ValidityIndex::davies_bouldin;
    if (name == "silhouette") return ValidityIndex::silhouette;
    throw std::invalid_argument("unknown validity index '" + name + "'");
}

Representative parse_representative(const std::string& name) {
    if (name == "mean") return Representative::mean;
    if (name == "medoid") return Representative::medoid;
    throw std::invalid_argument("unknown representative '" + name + "'");
}

double mean_dissim(const Segment& y, std::span<const Segment> group, const DissimilarityMeasure& dissim) {
    if (group.empty()) throw std::invalid_argument("mean_dissim: empty group");
    double sum = 0.0;
    for (const auto& x : group) sum += dissim(y, x);
    return sum / static_cast<double>(group.size());
}

Segment motif_mean(std::span<const Segment> group) {
    if (group.empty()) throw std::invalid_argument("motif_mean: empty group");
    const Segment& head = group.front();
    std::vector<double> acc(head.values().size(), 0.0);
    for (const auto& x : group) {
        if (!x.same_shape(head)) throw std::invalid_argument("motif_mean: segment shapes differ");
        const auto v = x.values();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
    }
    const auto count = static_cast<double>(group.size());
    for (double& a : acc) a /= count;
    return Segment(std::move(acc), head.dims(), head.origin());
}

std::size_t medoid_index(std::span<const Segment> group, const DissimilarityMeasure& dissim) {
    if (group.empty()) throw std::invalid_argument("motif_medoid: empty group");
    const std::size_t s = group.size();
    std::vector<double> sums(s, 0.0);
    for (std::size_t u = 0; u < s; ++u) {
        for (std::size_t v = u + 1; v < s; ++v) {
            const double d = dissim(group[u], group[v]);
            sums[u] += d;
            sums[v] += d;
        }
    }
    return static_cast<std::size_t>(std::min_element(sums.begin(), sums.end()) - sums.begin());
}

Segment motif_medoid(std::span<const Segment> group, const DissimilarityMeasure& dissim) {
    return group[medoid_index(group, dissim)];
}

Segment motif_representative(std::span<const Segment> group, Representative rep,
                             const DissimilarityMeasure& dissim) {
    return rep == Representative::mean ? motif_mean(group) : motif_medoid(group, dissim);
}

double davies_bouldin(const SegmentGroupSet& groups, const DissimilarityMeasure& dissim,
                      Representative rep) {
    const std::size_t k = groups.motif_count();
    if (k < 2) throw std::invalid_argument("davies_bouldin: needs at least two groups");

    std::vector<Segment> reps;
    std::vector<double> spread;
    reps.reserve(k);
    spread.reserve(k);
    for (const auto& g : groups.groups) {
        reps.push_back(motif_representative(g, rep, dissim));
        spread.push_back(mean_dissim(reps.back(), g, dissim));
    }

    std::vector<double> worst(k, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double sep = dissim(reps[i], reps[j]);
            if (!(sep > 0.0)) return kWorstFitness;
            const double ratio = (spread[i] + spread[j]) / sep;
            worst[i] = std::max(worst[i], ratio);
            worst[j] = std::max(worst[j], ratio);
        }
    }
    return std::accumulate(worst.begin(), worst.end(), 0.0) / static_cast<double>(k);
}

double silhouette_index(const SegmentGroupSet& groups, const DissimilarityMeasure& dissim) {
    const std::size_t k = groups.motif_count();
    const std::size_t s = groups.support();
    if (k < 2 || s < 1) throw std::invalid_argument("silhouette_index: needs k >= 2 and s >= 1");

    // Flattened pairwise dissimilarities; segment u of group i sits at i*s+u.
    const std::size_t total = k * s;
    std::vector<const Segment*> flat;
    flat.reserve(total);
    for (const auto& g : groups.groups) {
        if (g.size() != s) throw std::invalid_argument("silhouette_index: unequal group sizes");
        for (const auto& x : g) flat.push_back(&x);
    }
    std::vector<double> dist(total * total, 0.0);
    for (std::size_t a = 0; a < total; ++a) {
        for (std::size_t b = a + 1; b < total; ++b) {
            const double d = dissim(*flat[a], *flat[b]);
            dist[a * total + b] = d;
            dist[b * total + a] = d;
        }
    }

    double sum = 0.0;
    for (std::size_t a = 0; a < total; ++a) {
        const std::size_t own = a / s;
        double within = 0.0;
        double outside = 0.0;
        for (std::size_t b = 0; b < total; ++b) {
            if (b / s == own) within += dist[a * total + b];
            else outside += dist[a * total + b];
        }
        within /= static_cast<double>(s);
        outside /= static_cast<double>(total - s);
        const double denom = std::max(within, outside);
        if (denom > 0.0) sum += (outside - within) / denom;
    }
    return 1.0 - sum / static_cast<double>(total);
}

double validity_index(const SegmentGroupSet& groups, const FitnessConfig& cfg) {
    switch (cfg.index) {
        case ValidityIndex::davies_bouldin:
            return davies_bouldin(groups, cfg.dissimilarity, cfg.representative);
        case ValidityIndex::silhouette:
            return silhouette_index(groups, cfg.dissimilarity);
    }
    throw std::logic_error("unhandled validity index");
}

std::vector<Segment> prepare_segments(const TimeSeries& z, std::span<const Gene> genes,
                                      std::size_t max_length, bool znorm) {
    std::vector<Segment> out;
    out.reserve(genes.size());
    for (const auto& g : genes) {
        Segment seg = upsample_linear(extract_segment(z, g.start, g.length), max_length);
        out.push_back(znorm ? znormalize(std::move(seg)) : std::move(seg));
    }
    return out;
}

std::vector<std::size_t> indicator_order(std::span<const Gene> genes) {
    std::vector<std::size_t> order(genes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return genes[a].indicator < genes[b].indicator; });
    return order;
}

SegmentGroupSet group_segments(std::span<const Segment> segments, std::span<const std::size_t> order,
                               std::size_t support) {
    if (support == 0 || order.size() % support != 0)
        throw std::invalid_argument("group_segments: segment count is not a multiple of the support");
    SegmentGroupSet out;
    out.groups.resize(order.size() / support);
    for (std::size_t i = 0; i < order.size(); ++i) out.groups[i / support].push_back(segments[order[i]]);
    return out;
}

double goodness(const TimeSeries& z, std::span<const Gene> genes, const FitnessConfig& cfg,
                std::size_t max_length, std::size_t support) {
    if (some_overlap(genes, cfg.overlap_tolerance)) return kWorstFitness;
    const auto segments = prepare_segments(z, genes, max_length, cfg.znorm);
    const auto order = indicator_order(genes);
    return validity_index(group_segments(segments, order, support), cfg);
}

double search_space_size(std::int64_t n, std::int64_t l_min, std::int64_t l_max, std::int64_t k,
                         std::int64_t s) {
    const std::int64_t r = l_max + 1 - l_min;
    const std::int64_t pool = n * r;
    const std::int64_t pick = k * s;
    if (n < 1 || r < 1 || pick < 1 || pool < pick)
        throw std::invalid_argument("search_space_size: need n*r >= k*s with positive terms");
    const auto m = static_cast<double>(pool);
    const auto p = static_cast<double>(pick);
    return (std::lgamma(m + 1.0) - std::lgamma(p + 1.0) - std::lgamma(m - p + 1.0)) / std::log(10.0);
}

}  // namespace genmotif
