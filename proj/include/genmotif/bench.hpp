#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genmotif/engine.hpp"
#include "genmotif/scoring.hpp"
#include "genmotif/timeseries.hpp"

namespace genmotif::bench {

/// Random walk with square-wave instances spliced in.
struct PlantedSpec {
    std::int64_t pattern_length = 58;
    std::size_t patterns = 2;
    std::size_t reps_per_pattern = 50;
    double min_scale = 0.9;
    double motif_mass = 0.10;
    double walk_step_std = 0.1;
    std::uint64_t seed = 1;
    std::size_t placement_retries = 100'000;

    /// reps * patterns * pattern_length / motif_mass, rounded.
    std::int64_t series_length() const;
    std::int64_t min_instance_length() const;
    void validate() const;
};

struct PlantedOccurrence {
    std::size_t pattern = 1;  ///< 1-based pattern id
    std::int64_t start = 1;   ///< 1-based
    std::int64_t length = 1;

    Interval interval() const { return {start, length}; }
};

struct PlantedGroundTruth {
    std::vector<PlantedOccurrence> occurrences;

    std::size_t pattern_count() const;
};

struct PlantedSeries {
    TimeSeries series;
    PlantedGroundTruth truth;
};

/// One period of a square wave: pattern 1 goes low then high, pattern 2 high
/// then low, and further ids alternate with a doubled frequency per pair.
std::vector<double> square_wave(std::int64_t length, std::size_t pattern);

/// Throws std::runtime_error when the instances cannot be placed.
PlantedSeries generate_planted(const PlantedSpec& spec);

void write_ground_truth(const PlantedGroundTruth& truth, const std::string& path);
PlantedGroundTruth read_ground_truth(const std::string& path);

/// Uniform random search baseline: draws fresh solutions until the budget is
/// spent, keeping the best. `generations` in the result counts draws.
EvolveResult random_search(const TimeSeries& z, const TaskSpec& task, const Budget& budget, Rng& rng,
                           const Observer& observer = {}, const std::atomic<bool>* cancel = nullptr,
                           std::size_t trace_interval = 1000);

struct RecoveryConfig {
    /// A support hits an occurrence when they share at least this fraction of
    /// the shorter interval.
    double min_overlap = 0.5;
    /// Hits on one pattern needed for a group to recover it; 0 means ceil(s/2).
    std::size_t min_hits = 0;
};

struct GroupRecovery {
    std::vector<std::size_t> hits_by_pattern;  ///< index = pattern id - 1
    std::optional<std::size_t> recovered_pattern;
};

struct RecoveryReport {
    std::vector<GroupRecovery> groups;
    std::size_t pattern_count = 0;

    std::vector<std::size_t> recovered_patterns() const;
    bool all_recovered() const { return recovered_patterns().size() == pattern_count; }
};

/// Groups the solution exactly like the fitness does (indicator order) and
/// counts, per group, the supports landing on each planted pattern.
RecoveryReport recovery_score(const Solution& sol, const PlantedGroundTruth& truth, std::size_t support,
                              const RecoveryConfig& cfg = {});

/// Same, from explicit per-group support intervals (e.g. read from a report).
RecoveryReport recovery_score(const std::vector<std::vector<Interval>>& groups, const PlantedGroundTruth& truth,
                              const RecoveryConfig& cfg = {});

enum class CheckpointAxis { elapsed_ms, evaluations };

struct ExperimentConfig {
    std::size_t repetitions = 10;
    std::uint64_t base_seed = 1;
    Budget budget;
    CheckpointAxis axis = CheckpointAxis::elapsed_ms;
    std::vector<double> checkpoints;
    bool include_random_search = true;
};

struct RunRecord {
    std::string method;
    std::uint64_t seed = 0;
    double checkpoint = 0.0;
    std::size_t generation = 0;
    double best_fitness = kWorstFitness;
    double sigma = 0.0;
    std::size_t rho = 0;
};

struct CheckpointSummary {
    std::string method;
    double checkpoint = 0.0;
    double median = kWorstFitness;
    double lower = kWorstFitness;  ///< 2.5th percentile
    double upper = kWorstFitness;  ///< 97.5th percentile
    std::size_t runs = 0;
    double sigma = 0.0;
    std::size_t rho = 0;
};

struct ExperimentTable {
    CheckpointAxis axis = CheckpointAxis::elapsed_ms;
    std::vector<RunRecord> records;
    std::vector<CheckpointSummary> summary;

    /// Per-seed fitness at the last checkpoint, in seed order, optionally
    /// restricted to one sigma / population size.
    std::vector<double> final_values(const std::string& method, std::optional<double> sigma = {},
                                     std::optional<std::size_t> rho = {}) const;
};

/// GA against random search with matched budgets; repetition r uses seed
/// base_seed + r for both methods.
ExperimentTable convergence_experiment(const TimeSeries& z, const TaskSpec& task, const GaParams& params,
                                       const ExperimentConfig& cfg);

enum class SweepParameter { sigma, rho };

/// GA-only runs over a grid of sigma or population-size values.
ExperimentTable sweep_experiment(const TimeSeries& z, const TaskSpec& task, const GaParams& params,
                                 const ExperimentConfig& cfg, SweepParameter parameter,
                                 const std::vector<double>& values);

void write_experiment_csv(const ExperimentTable& table, const std::string& path, bool sweep_columns);
void write_summary_csv(const ExperimentTable& table, const std::string& path, bool sweep_columns);

/// Linear-interpolation percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);
double median(std::vector<double> values);

/// Two-sided exact binomial sign test p-value; ties are dropped beforehand.
double sign_test_pvalue(std::size_t wins, std::size_t losses);

}  // namespace genmotif::bench
