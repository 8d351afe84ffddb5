#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genmotif/engine.hpp"
#include "genmotif/scoring.hpp"
#include "genmotif/timeseries.hpp"

namespace genmotif {

inline constexpr int kReportFormatVersion = 1;

struct MotifSupport {
    Gene gene;
    Segment original;  ///< raw slice, source length
    Segment prepared;  ///< upsampled to l_max and, if enabled, z-normalized
};

struct Motif {
    std::size_t index = 0;
    Segment representative;
    double spread = 0.0;  ///< mean dissimilarity of the supports to the representative
    std::vector<MotifSupport> supports;
};

/// Everything needed to rerun or rescore a discovery job.
struct RunInfo {
    double fitness = kWorstFitness;
    std::string index = "db";
    std::string representative = "mean";
    std::string dissimilarity = "sqeuclidean";
    bool znorm = true;
    double overlap_tolerance = 0.0;
    double elapsed_ms = 0.0;
    std::size_t generations = 0;
    std::size_t evaluations = 0;
    bool cancelled = false;
    std::uint64_t seed = 0;
    std::size_t population_size = 51;
    double sigma = 1e-2;
    std::size_t threads = 1;
    bool tournament_selection = false;
    std::optional<double> time_limit_ms;
    std::optional<std::size_t> generation_limit;
    std::size_t k = 0;
    std::size_t support = 0;
    std::int64_t min_length = 0;
    std::int64_t max_length = 0;
    std::string input;
    std::size_t series_length = 0;
    std::size_t dims = 0;
};

struct MotifReport {
    int format_version = kReportFormatVersion;
    RunInfo run;
    std::vector<Motif> motifs;

    TaskSpec task() const;
    /// Genes in report order (motif by motif, supports in indicator order).
    Solution solution() const;
};

/// Builds the user-facing report for a finished run. Motifs follow the
/// indicator grouping used by the fitness.
MotifReport build_report(const TimeSeries& z, const TaskSpec& task, const GaParams& params,
                         const EvolveResult& result, const std::string& input);

std::string report_to_string(const MotifReport& report);
MotifReport report_from_string(const std::string& text);

/// Writes to a temporary file first and renames it into place.
void write_report(const MotifReport& report, const std::string& path);
MotifReport read_report(const std::string& path);

/// Re-extracts every support from z and scores it with the echoed config.
double rescore_report(const MotifReport& report, const TimeSeries& z);

}  // namespace genmotif
