#include "genmotif/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace genmotif::bench {

std::int64_t PlantedSpec::series_length() const {
    return std::llround(static_cast<double>(reps_per_pattern * patterns) * static_cast<double>(pattern_length) /
                        motif_mass);
}

std::int64_t PlantedSpec::min_instance_length() const {
    return std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(min_scale * static_cast<double>(pattern_length) - 1e-9)));
}

void PlantedSpec::validate() const {
    if (pattern_length < 2) throw std::invalid_argument("pattern length must be at least 2");
    if (patterns < 1 || reps_per_pattern < 1) throw std::invalid_argument("need at least one planted instance");
    if (!(min_scale > 0.0 && min_scale <= 1.0)) throw std::invalid_argument("min_scale must lie in (0, 1]");
    if (!(motif_mass > 0.0 && motif_mass < 1.0)) throw std::invalid_argument("motif_mass must lie in (0, 1)");
    if (!(walk_step_std >= 0.0)) throw std::invalid_argument("walk step deviation must be non-negative");
}

std::size_t PlantedGroundTruth::pattern_count() const {
    std::size_t count = 0;
    for (const auto& o : occurrences) count = std::max(count, o.pattern);
    return count;
}

std::vector<double> square_wave(std::int64_t length, std::size_t pattern) {
    const std::size_t periods = (pattern + 1) / 2;
    const bool starts_low = pattern % 2 == 1;
    std::vector<double> wave(static_cast<std::size_t>(length));
    for (std::int64_t t = 0; t < length; ++t) {
        const auto phase = static_cast<std::size_t>(2 * periods * static_cast<std::size_t>(t) /
                                                    static_cast<std::size_t>(length));
        const bool low = (phase % 2 == 0) == starts_low;
        wave[static_cast<std::size_t>(t)] = low ? -1.0 : 1.0;
    }
    return wave;
}

PlantedSeries generate_planted(const PlantedSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::int64_t n = spec.series_length();

    std::vector<double> walk(static_cast<std::size_t>(n));
    std::normal_distribution<double> step(0.0, spec.walk_step_std);
    walk[0] = 0.0;
    for (std::size_t i = 1; i < walk.size(); ++i) walk[i] = walk[i - 1] + (spec.walk_step_std > 0 ? step(rng) : 0.0);

    std::vector<PlantedOccurrence> instances;
    std::uniform_int_distribution<std::int64_t> length_dist(spec.min_instance_length(), spec.pattern_length);
    for (std::size_t p = 1; p <= spec.patterns; ++p) {
        for (std::size_t r = 0; r < spec.reps_per_pattern; ++r) instances.push_back({p, 0, length_dist(rng)});
    }
    std::shuffle(instances.begin(), instances.end(), rng);

    std::vector<Interval> placed;
    for (auto& inst : instances) {
        std::uniform_int_distribution<std::int64_t> start_dist(1, n - inst.length + 1);
        bool ok = false;
        for (std::size_t attempt = 0; attempt < spec.placement_retries && !ok; ++attempt) {
            inst.start = start_dist(rng);
            ok = std::none_of(placed.begin(), placed.end(),
                              [&](const Interval& iv) { return shared_samples(iv, inst.interval()) > 0; });
        }
        if (!ok) throw std::runtime_error("cannot place all planted instances without overlap");
        placed.push_back(inst.interval());
    }
    std::sort(instances.begin(), instances.end(),
              [](const PlantedOccurrence& a, const PlantedOccurrence& b) { return a.start < b.start; });

    for (const auto& inst : instances) {
        const auto wave = square_wave(spec.pattern_length, inst.pattern);
        const Segment full(std::vector<double>(wave.begin(), wave.end()), 1, {1, spec.pattern_length});
        const Segment shaped = resample_linear(full, static_cast<std::size_t>(inst.length));
        const auto first = static_cast<std::size_t>(inst.start - 1);
        const double level = first > 0 ? walk[first - 1] : 0.0;
        const double anchor = shaped(0, 0);
        for (std::size_t t = 0; t < shaped.length(); ++t) walk[first + t] = level + shaped(t, 0) - anchor;
    }

    return {TimeSeries::univariate(std::move(walk)), PlantedGroundTruth{std::move(instances)}};
}

void write_ground_truth(const PlantedGroundTruth& truth, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << "pattern_id,start,length\n";
        for (const auto& o : truth.occurrences) out << o.pattern << ',' << o.start << ',' << o.length << '\n';
        if (!out) throw std::runtime_error("write to '" + path + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

PlantedGroundTruth read_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    PlantedGroundTruth truth;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line_no == 1 && line.rfind("pattern_id", 0) == 0) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        PlantedOccurrence o;
        if (!(fields >> o.pattern >> o.start >> o.length) || o.pattern < 1 || o.start < 1 || o.length < 1)
            throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": malformed ground-truth row");
        truth.occurrences.push_back(o);
    }
    return truth;
}

EvolveResult random_search(const TimeSeries& z, const TaskSpec& task, const Budget& budget, Rng& rng,
                           const Observer& observer, const std::atomic<bool>* cancel, std::size_t trace_interval) {
    task.validate(z.length());
    if (!budget.bounded()) throw std::invalid_argument("random search needs a budget");

    BudgetClock clock;
    const auto n = static_cast<std::int64_t>(z.length());
    const auto max_len = static_cast<std::size_t>(task.max_length);
    EvolveResult result;
    clock.start_iterations();

    while (true) {
        Solution candidate = new_solution(rng, n, task.min_length, task.max_length, task.segment_count(),
                                          task.fitness.overlap_tolerance);
        const double g = goodness(z, candidate, task.fitness, max_len, task.support);
        ++result.evaluations;
        ++result.generations;
        const bool improved = g < result.best_fitness || result.best.empty();
        if (improved) {
            result.best_fitness = g;
            result.best = std::move(candidate);
        }
        clock.finish_iteration();

        const TraceRecord record{clock.elapsed_ms(), result.generations - 1, result.best_fitness,
                                 result.evaluations};
        const BudgetState state{clock.elapsed_s(), clock.iteration_estimate_s(), result.generations,
                                result.evaluations};
        const bool cancelled = cancel && cancel->load(std::memory_order_relaxed);
        const bool stop = cancelled || out_of_time(state, budget);
        const bool periodic = trace_interval > 0 && result.evaluations % trace_interval == 0;
        if (improved || periodic || stop) result.trace.records.push_back(record);
        if (observer) observer(record);
        if (stop) {
            result.cancelled = cancelled;
            break;
        }
    }
    result.elapsed_ms = clock.elapsed_ms();
    return result;
}

namespace {

std::size_t hits_needed(std::size_t support, const RecoveryConfig& cfg) {
    return cfg.min_hits > 0 ? cfg.min_hits : (support + 1) / 2;
}

}  // namespace

RecoveryReport recovery_score(const std::vector<std::vector<Interval>>& groups, const PlantedGroundTruth& truth,
                              const RecoveryConfig& cfg) {
    RecoveryReport report;
    report.pattern_count = truth.pattern_count();
    for (const auto& group : groups) {
        GroupRecovery gr;
        gr.hits_by_pattern.assign(report.pattern_count, 0);
        for (const auto& support : group) {
            // Among qualifying occurrences, the one sharing the most samples wins.
            std::int64_t best_shared = 0;
            std::optional<std::size_t> hit;
            for (const auto& occ : truth.occurrences) {
                const std::int64_t shared = shared_samples(support, occ.interval());
                const auto shorter = static_cast<double>(std::min(support.length, occ.length));
                if (shared > 0 && static_cast<double>(shared) >= cfg.min_overlap * shorter && shared > best_shared) {
                    best_shared = shared;
                    hit = occ.pattern;
                }
            }
            if (hit) ++gr.hits_by_pattern[*hit - 1];
        }
        const std::size_t needed = hits_needed(group.size(), cfg);
        std::size_t best_hits = 0;
        for (std::size_t p = 0; p < gr.hits_by_pattern.size(); ++p) {
            if (gr.hits_by_pattern[p] >= needed && gr.hits_by_pattern[p] > best_hits) {
                best_hits = gr.hits_by_pattern[p];
                gr.recovered_pattern = p + 1;
            }
        }
        report.groups.push_back(std::move(gr));
    }
    return report;
}

RecoveryReport recovery_score(const Solution& sol, const PlantedGroundTruth& truth, std::size_t support,
                              const RecoveryConfig& cfg) {
    if (support == 0 || sol.size() % support != 0)
        throw std::invalid_argument("recovery_score: gene count is not a multiple of the support");
    const auto order = indicator_order(sol);
    std::vector<std::vector<Interval>> groups(sol.size() / support);
    for (std::size_t i = 0; i < order.size(); ++i) groups[i / support].push_back(sol[order[i]].interval());
    return recovery_score(groups, truth, cfg);
}

std::vector<std::size_t> RecoveryReport::recovered_patterns() const {
    std::vector<std::size_t> out;
    for (const auto& g : groups) {
        if (g.recovered_pattern && std::find(out.begin(), out.end(), *g.recovered_pattern) == out.end())
            out.push_back(*g.recovered_pattern);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) return kWorstFitness;
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double w = pos - static_cast<double>(lo);
    if (w == 0.0 || values[lo] == values[hi]) return values[lo];
    if (std::isinf(values[hi])) return values[hi];
    return values[lo] + w * (values[hi] - values[lo]);
}

double median(std::vector<double> values) {
    return percentile(std::move(values), 0.5);
}

double sign_test_pvalue(std::size_t wins, std::size_t losses) {
    const std::size_t n = wins + losses;
    if (n == 0) return 1.0;
    const std::size_t k = std::min(wins, losses);
    // log-space binomial terms keep large n finite
    double tail = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
        const double log_term = std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(i) + 1) -
                                std::lgamma(static_cast<double>(n - i) + 1) - static_cast<double>(n) * std::log(2.0);
        tail += std::exp(log_term);
    }
    return std::min(1.0, 2.0 * tail);
}

namespace {

/// Captures, for every checkpoint, the last observer record at or before it.
class CheckpointRecorder {
public:
    CheckpointRecorder(CheckpointAxis axis, const std::vector<double>& checkpoints)
        : axis_(axis), checkpoints_(checkpoints), captured_(checkpoints.size()) {}

    void observe(const TraceRecord& rec) {
        const double v = axis_ == CheckpointAxis::elapsed_ms ? rec.elapsed_ms : static_cast<double>(rec.evaluations);
        while (next_ < checkpoints_.size() && v > checkpoints_[next_]) captured_[next_++] = latest_;
        latest_ = rec;
    }

    std::vector<std::optional<TraceRecord>> finish() {
        while (next_ < checkpoints_.size()) captured_[next_++] = latest_;
        return captured_;
    }

private:
    CheckpointAxis axis_;
    const std::vector<double>& checkpoints_;
    std::vector<std::optional<TraceRecord>> captured_;
    std::optional<TraceRecord> latest_;
    std::size_t next_ = 0;
};

void append_run(ExperimentTable& table, const std::string& method, std::uint64_t seed, double sigma,
                std::size_t rho, const std::vector<double>& checkpoints,
                const std::vector<std::optional<TraceRecord>>& captured) {
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        RunRecord rec;
        rec.method = method;
        rec.seed = seed;
        rec.checkpoint = checkpoints[c];
        rec.sigma = sigma;
        rec.rho = rho;
        if (captured[c]) {
            rec.generation = captured[c]->generation;
            rec.best_fitness = captured[c]->best_fitness;
        }
        table.records.push_back(rec);
    }
}

void summarize(ExperimentTable& table) {
    using Key = std::tuple<std::string, double, std::size_t, double>;
    std::map<Key, std::vector<double>> buckets;
    for (const auto& r : table.records) buckets[{r.method, r.sigma, r.rho, r.checkpoint}].push_back(r.best_fitness);
    table.summary.clear();
    for (const auto& [key, values] : buckets) {
        CheckpointSummary s;
        std::tie(s.method, s.sigma, s.rho, s.checkpoint) = key;
        s.median = median(values);
        s.lower = percentile(values, 0.025);
        s.upper = percentile(values, 0.975);
        s.runs = values.size();
        table.summary.push_back(s);
    }
}

std::vector<double> sorted_checkpoints(const ExperimentConfig& cfg) {
    if (cfg.repetitions < 2) throw std::invalid_argument("experiments need at least two repetitions");
    if (cfg.checkpoints.empty()) throw std::invalid_argument("experiments need at least one checkpoint");
    auto cps = cfg.checkpoints;
    std::sort(cps.begin(), cps.end());
    return cps;
}

void run_ga(ExperimentTable& table, const TimeSeries& z, const TaskSpec& task, GaParams params,
            const ExperimentConfig& cfg, const std::vector<double>& cps, std::uint64_t seed) {
    params.seed = seed;
    params.budget = cfg.budget;
    CheckpointRecorder recorder(cfg.axis, cps);
    evolve(z, task, params, [&](const TraceRecord& r) { recorder.observe(r); });
    append_run(table, "ga", seed, params.sigma, params.population_size, cps, recorder.finish());
}

}  // namespace

std::vector<double> ExperimentTable::final_values(const std::string& method, std::optional<double> sigma,
                                                  std::optional<std::size_t> rho) const {
    double last = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) last = std::max(last, r.checkpoint);
    std::vector<double> out;
    for (const auto& r : records) {
        if (r.method != method || r.checkpoint != last) continue;
        if ((sigma && r.sigma != *sigma) || (rho && r.rho != *rho)) continue;
        out.push_back(r.best_fitness);
    }
    return out;
}

ExperimentTable convergence_experiment(const TimeSeries& z, const TaskSpec& task, const GaParams& params,
                                       const ExperimentConfig& cfg) {
    const auto cps = sorted_checkpoints(cfg);
    ExperimentTable table;
    table.axis = cfg.axis;
    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
        const std::uint64_t seed = cfg.base_seed + r;
        run_ga(table, z, task, params, cfg, cps, seed);
        if (cfg.include_random_search) {
            Rng rng(seed);
            CheckpointRecorder recorder(cfg.axis, cps);
            random_search(z, task, cfg.budget, rng, [&](const TraceRecord& rec) { recorder.observe(rec); });
            append_run(table, "random", seed, 0.0, 0, cps, recorder.finish());
        }
    }
    summarize(table);
    return table;
}

ExperimentTable sweep_experiment(const TimeSeries& z, const TaskSpec& task, const GaParams& params,
                                 const ExperimentConfig& cfg, SweepParameter parameter,
                                 const std::vector<double>& values) {
    const auto cps = sorted_checkpoints(cfg);
    ExperimentTable table;
    table.axis = cfg.axis;
    for (const double value : values) {
        GaParams p = params;
        if (parameter == SweepParameter::sigma) p.sigma = value;
        else p.population_size = static_cast<std::size_t>(std::llround(value));
        for (std::size_t r = 0; r < cfg.repetitions; ++r) run_ga(table, z, task, p, cfg, cps, cfg.base_seed + r);
    }
    summarize(table);
    return table;
}

namespace {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

const char* checkpoint_column(CheckpointAxis axis) {
    return axis == CheckpointAxis::elapsed_ms ? "checkpoint_ms" : "checkpoint_evaluations";
}

template <typename Fn>
void write_atomically(const std::string& path, Fn&& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        body(out);
        if (!out) throw std::runtime_error("write to '" + path + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

void write_experiment_csv(const ExperimentTable& table, const std::string& path, bool sweep_columns) {
    write_atomically(path, [&](std::ostream& out) {
        out << "method,seed," << checkpoint_column(table.axis) << ",generation,best_fitness" << (sweep_columns ? ",sigma,rho" : "") << '\n';
        for (const auto& r : table.records) {
            out << r.method << ',' << r.seed << ',' << format_double(r.checkpoint) << ',' << r.generation << ','
                << format_double(r.best_fitness);
            if (sweep_columns) out << ',' << format_double(r.sigma) << ',' << r.rho;
            out << '\n';
        }
    });
}

void write_summary_csv(const ExperimentTable& table, const std::string& path, bool sweep_columns) {
    write_atomically(path, [&](std::ostream& out) {
        out << "method," << checkpoint_column(table.axis) << ",runs,median,p2_5,p97_5" << (sweep_columns ? ",sigma,rho" : "") << '\n';
        for (const auto& s : table.summary) {
            out << s.method << ',' << format_double(s.checkpoint) << ',' << s.runs << ',' << format_double(s.median)
                << ',' << format_double(s.lower) << ',' << format_double(s.upper);
            if (sweep_columns) out << ',' << format_double(s.sigma) << ',' << s.rho;
            out << '\n';
        }
    });
}

}  // namespace genmotif::bench
