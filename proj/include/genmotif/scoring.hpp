#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "genmotif/timeseries.hpp"

namespace genmotif {

/// Worst possible fitness. Returned for overlapping solutions and for
/// groupings whose motif representatives coincide.
inline constexpr double kWorstFitness = std::numeric_limits<double>::infinity();

/// A symmetric, non-negative dissimilarity between equally shaped segments.
/// The triangle inequality is not required.
struct DissimilarityMeasure {
    std::string name;
    std::function<double(const Segment&, const Segment&)> evaluate;

    double operator()(const Segment& a, const Segment& b) const { return evaluate(a, b); }
};

/// Sum of squared differences over all samples and dimensions.
double sq_euclidean(const Segment& x, const Segment& y);

DissimilarityMeasure squared_euclidean();

/// Looks up a built-in measure by name ("sqeuclidean").
DissimilarityMeasure dissimilarity_by_name(const std::string& name);

enum class ValidityIndex { davies_bouldin, silhouette };
enum class Representative { mean, medoid };

std::string to_string(ValidityIndex index);
std::string to_string(Representative rep);
ValidityIndex parse_validity_index(const std::string& name);
Representative parse_representative(const std::string& name);

struct FitnessConfig {
    ValidityIndex index = ValidityIndex::davies_bouldin;
    Representative representative = Representative::mean;
    DissimilarityMeasure dissimilarity = squared_euclidean();
    bool znorm = true;
    double overlap_tolerance = 0.0;
};

/// k disjoint groups of s equally long, preprocessed segments.
struct SegmentGroupSet {
    std::vector<std::vector<Segment>> groups;

    std::size_t motif_count() const { return groups.size(); }
    std::size_t support() const { return groups.empty() ? 0 : groups.front().size(); }
};

/// Mean dissimilarity between y and the members of group.
double mean_dissim(const Segment& y, std::span<const Segment> group, const DissimilarityMeasure& dissim);

/// Sample-wise arithmetic mean of the group.
Segment motif_mean(std::span<const Segment> group);

/// Position of the member minimizing the summed dissimilarity to all
/// members; ties go to the lowest position.
std::size_t medoid_index(std::span<const Segment> group, const DissimilarityMeasure& dissim);
Segment motif_medoid(std::span<const Segment> group, const DissimilarityMeasure& dissim);

Segment motif_representative(std::span<const Segment> group, Representative rep,
                             const DissimilarityMeasure& dissim);

/// Davies-Bouldin index (lower is better). Requires k >= 2. Returns
/// kWorstFitness when two representatives are at zero dissimilarity.
double davies_bouldin(const SegmentGroupSet& groups, const DissimilarityMeasure& dissim,
                      Representative rep);

/// Silhouette-style index, 1 minus the mean summand, where each segment's
/// "other" term pools every segment outside its own group and its own-group
/// term includes its zero self-dissimilarity. Range [0, 2], lower is better.
double silhouette_index(const SegmentGroupSet& groups, const DissimilarityMeasure& dissim);

double validity_index(const SegmentGroupSet& groups, const FitnessConfig& cfg);

/// Extracts every gene's segment, upsamples it to max_length and optionally
/// z-normalizes it. Output order follows the gene order.
std::vector<Segment> prepare_segments(const TimeSeries& z, std::span<const Gene> genes,
                                      std::size_t max_length, bool znorm);

/// Stable argsort of the gene indicators; ties keep gene order.
std::vector<std::size_t> indicator_order(std::span<const Gene> genes);

/// Chunks segments, taken in the given order, into consecutive groups of
/// `support` members.
SegmentGroupSet group_segments(std::span<const Segment> segments, std::span<const std::size_t> order,
                               std::size_t support);

/// The GA fitness: +inf for overlapping solutions, otherwise the configured
/// validity index of the indicator-sorted grouping.
double goodness(const TimeSeries& z, std::span<const Gene> genes, const FitnessConfig& cfg,
                std::size_t max_length, std::size_t support);

/// log10 of C(n*r, k*s) with r = l_max + 1 - l_min: the number of ways to
/// pick k*s segments among all (start, length) pairs.
double search_space_size(std::int64_t n, std::int64_t l_min, std::int64_t l_max, std::int64_t k,
                         std::int64_t s);

}  // namespace genmotif
