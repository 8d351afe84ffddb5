#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "genmotif/scoring.hpp"
#include "genmotif/timeseries.hpp"

namespace genmotif {

using Rng = std::mt19937_64;

/// Raised when no valid (non-overlapping) placement can be produced.
class InfeasibleTask : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// What the user wants found: k motifs of `support` segments each, with
/// segment lengths in [min_length, max_length].
struct TaskSpec {
    std::size_t k = 1;
    std::size_t support = 2;
    std::int64_t min_length = 1;
    std::int64_t max_length = 1;
    FitnessConfig fitness;

    std::size_t segment_count() const { return k * support; }

    /// Throws std::invalid_argument for malformed tasks and InfeasibleTask
    /// when k*s*l_min exceeds the series length.
    void validate(std::size_t series_length) const;
};

/// Stopping rule. Any limit that is set can end the run; at least one must be set.
struct Budget {
    std::optional<std::chrono::nanoseconds> time_limit;
    std::optional<std::size_t> generation_limit;
    std::optional<std::size_t> evaluation_limit;

    bool bounded() const { return time_limit || generation_limit || evaluation_limit; }
};

struct GaParams {
    std::size_t population_size = 51;
    double sigma = 1e-2;
    std::uint64_t seed = 0;
    Budget budget;
    /// Worker threads for the fitness pass; results do not depend on it.
    std::size_t threads = 1;
    /// Off: parents are drawn uniformly with replacement.
    bool tournament_selection = false;
    std::size_t tournament_size = 2;
    std::size_t init_retry_cap = 1'000'000;

    void validate() const;
};

struct TraceRecord {
    double elapsed_ms = 0.0;
    std::size_t generation = 0;
    double best_fitness = kWorstFitness;
    std::size_t evaluations = 0;
};

/// Convergence history. Holds the first and last generation plus every
/// generation that improved the best fitness.
struct RunTrace {
    std::vector<TraceRecord> records;

    /// Best fitness known at the given elapsed time (+inf before the first record).
    double best_at_ms(double elapsed_ms) const;
    /// Best fitness known once `evaluations` evaluations were spent.
    double best_at_evaluations(std::size_t evaluations) const;
};

using Observer = std::function<void(const TraceRecord&)>;

/// Snapshot consumed by out_of_time.
struct BudgetState {
    double elapsed_s = 0.0;
    /// Smoothed duration of one iteration; empty until one has been timed.
    std::optional<double> iteration_estimate_s;
    std::size_t generations = 0;
    std::size_t evaluations = 0;
};

/// True once the hard time cap is hit, the next iteration is predicted to
/// overrun it, or a count limit is reached.
bool out_of_time(const BudgetState& state, const Budget& budget);

/// Wall-clock bookkeeping for anytime loops: monotonic elapsed time plus an
/// exponential moving average of the iteration duration.
class BudgetClock {
public:
    static constexpr double kSmoothing = 0.2;

    BudgetClock();

    /// Marks the start of the timed iteration sequence.
    void start_iterations();
    /// Closes one iteration and folds its duration into the average.
    void finish_iteration();

    double elapsed_s() const;
    double elapsed_ms() const { return elapsed_s() * 1e3; }
    std::optional<double> iteration_estimate_s() const { return estimate_; }

private:
    using Clock = std::chrono::steady_clock;
    Clock::time_point origin_;
    Clock::time_point last_mark_;
    std::optional<double> estimate_;
};

/// One standard Cauchy draw, built as N(0,1) / |N(0,1)|.
double cauchy_sample(Rng& rng);

/// Draws uniformly random genes until the whole solution is overlap free.
/// Throws InfeasibleTask after retry_cap rejected solutions.
Solution new_solution(Rng& rng, std::int64_t n, std::int64_t l_min, std::int64_t l_max, std::size_t genes,
                      double overlap_tolerance = 0.0, std::size_t retry_cap = 1'000'000);

/// Uniform crossover: each aligned gene pair is exchanged with probability 1/ks.
std::pair<Solution, Solution> crossover(Solution a, Solution b, Rng& rng);

/// Cauchy perturbations applied to a single gene; draws are passed in so the
/// update rules can be checked directly.
struct CauchyDraws {
    double indicator;
    double length;
    double start;
};

Gene mutate_gene(Gene gene, double sigma, std::int64_t n, std::int64_t l_min, std::int64_t l_max,
                 const CauchyDraws& draws);

/// Mutates each gene with probability 1/ks, then shuffles the gene order.
Solution mutate(Solution x, double sigma, std::int64_t n, std::int64_t l_min, std::int64_t l_max, Rng& rng);

bool gene_in_bounds(const Gene& g, std::int64_t n, std::int64_t l_min, std::int64_t l_max);

struct EvolveResult {
    Solution best;
    double best_fitness = kWorstFitness;
    RunTrace trace;
    std::size_t generations = 0;
    std::size_t evaluations = 0;
    double elapsed_ms = 0.0;
    bool cancelled = false;
};

/// Runs the genetic search until the budget is spent or `cancel` is raised,
/// and returns the best solution ever scored.
EvolveResult evolve(const TimeSeries& z, const TaskSpec& task, const GaParams& params,
                    const Observer& observer = {}, const std::atomic<bool>* cancel = nullptr);

}  // namespace genmotif
