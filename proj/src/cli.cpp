#include "genmotif/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "genmotif/bench.hpp"
#include "genmotif/engine.hpp"
#include "genmotif/report.hpp"
#include "genmotif/timeseries.hpp"

namespace genmotif::cli {

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted.store(true); }

/// Installs the SIGINT handler for the lifetime of a run.
class InterruptGuard {
public:
    InterruptGuard() {
        g_interrupted.store(false);
        previous_ = std::signal(SIGINT, on_interrupt);
    }
    ~InterruptGuard() { std::signal(SIGINT, previous_); }
    InterruptGuard(const InterruptGuard&) = delete;
    InterruptGuard& operator=(const InterruptGuard&) = delete;

private:
    void (*previous_)(int) = SIG_DFL;
};

/// A flag problem detected after CLI11 parsing.
struct FlagError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int parse_args(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               bool& done) {
    done = false;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        done = true;
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        done = true;
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        done = true;
        app.exit(e, out, err);
        return kBadFlags;
    }
    return kOk;
}

struct TaskFlags {
    std::size_t k = 4;
    std::size_t support = 5;
    std::int64_t lmin = 50;
    std::int64_t lmax = 60;
    std::string index = "db";
    std::string centroid = "mean";
    double overlap_tolerance = 0.0;
    bool no_znorm = false;

    void add(CLI::App& app, bool required) {
        auto* k_opt = app.add_option("--k", k, "Number of motifs");
        auto* s_opt = app.add_option("--support", support, "Segments per motif");
        auto* lo_opt = app.add_option("--lmin", lmin, "Minimum segment length (samples)");
        auto* hi_opt = app.add_option("--lmax", lmax, "Maximum segment length (samples)");
        if (required) {
            k_opt->required();
            s_opt->required();
            lo_opt->required();
            hi_opt->required();
        } else {
            k_opt->capture_default_str();
            s_opt->capture_default_str();
            lo_opt->capture_default_str();
            hi_opt->capture_default_str();
        }
        app.add_option("--index", index, "Validity index used as fitness")
            ->check(CLI::IsMember({"db", "silhouette"}))
            ->capture_default_str();
        app.add_option("--centroid", centroid, "Motif representative")
            ->check(CLI::IsMember({"mean", "medoid"}))
            ->capture_default_str();
        app.add_option("--overlap-tolerance", overlap_tolerance,
                       "Fraction of the shorter segment two supports may share")
            ->capture_default_str();
        app.add_flag("--no-znorm", no_znorm, "Compare raw segments instead of z-normalized ones");
    }

    TaskSpec build() const {
        if (lmin < 1) throw FlagError("--lmin must be at least 1");
        if (lmin > lmax)
            throw FlagError("--lmin (" + std::to_string(lmin) + ") must not exceed --lmax (" + std::to_string(lmax) +
                            ")");
        if (support < 2) throw FlagError("--support must be at least 2");
        if (k < 1) throw FlagError("--k must be at least 1");
        if (k < 2) throw FlagError("--k must be at least 2 for the " + index + " index");
        if (overlap_tolerance < 0.0 || overlap_tolerance >= 1.0)
            throw FlagError("--overlap-tolerance must lie in [0, 1)");
        TaskSpec task;
        task.k = k;
        task.support = support;
        task.min_length = lmin;
        task.max_length = lmax;
        task.fitness.index = parse_validity_index(index);
        task.fitness.representative = parse_representative(centroid);
        task.fitness.znorm = !no_znorm;
        task.fitness.overlap_tolerance = overlap_tolerance;
        return task;
    }
};

struct GaFlags {
    std::size_t pop_size = 51;
    double sigma = 1e-2;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    bool tournament = false;

    void add(CLI::App& app, bool with_seed = true) {
        app.add_option("--pop-size", pop_size, "Population size (odd, >= 3)")->capture_default_str();
        app.add_option("--sigma", sigma, "Mutation deviation constant")->capture_default_str();
        if (with_seed) app.add_option("--seed", seed, "Random seed")->capture_default_str();
        app.add_option("--threads", threads, "Threads for fitness evaluation")->capture_default_str();
        app.add_flag("--tournament", tournament, "Binary tournament parent selection instead of uniform");
    }

    GaParams build() const {
        if (pop_size < 3 || pop_size % 2 == 0)
            throw FlagError("--pop-size must be an odd integer >= 3 (got " + std::to_string(pop_size) + ")");
        if (!(sigma > 0.0)) throw FlagError("--sigma must be positive");
        if (threads < 1) throw FlagError("--threads must be at least 1");
        GaParams p;
        p.population_size = pop_size;
        p.sigma = sigma;
        p.seed = seed;
        p.threads = threads;
        p.tournament_selection = tournament;
        return p;
    }
};

void check_feasible(const TaskSpec& task, const TimeSeries& z) {
    task.validate(z.length());
}

std::string format_fitness(double v) {
    if (std::isinf(v)) return "inf";
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << std::setprecision(17);
        out << "elapsed_ms,generation,best_fitness,evaluations\n";
        for (const auto& r : trace.records) {
            out << r.elapsed_ms << ',' << r.generation << ',';
            if (std::isinf(r.best_fitness)) out << "inf";
            else out << r.best_fitness;
            out << ',' << r.evaluations << '\n';
        }
        if (!out) throw std::runtime_error("write to '" + path + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

/// Maps library exceptions onto exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
    try {
        return body();
    } catch (const FlagError& e) {
        err << "error: " << e.what() << '\n';
        return kBadFlags;
    } catch (const CsvError& e) {
        err << "error: invalid input CSV: " << e.what() << '\n';
        return kBadInput;
    } catch (const InfeasibleTask& e) {
        err << "error: infeasible task: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kBadFlags;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

std::vector<double> default_checkpoints(double limit) {
    std::vector<double> cps;
    for (double decade = 1.0; decade < limit; decade *= 10.0) {
        for (double m : {1.0, 2.0, 5.0}) {
            if (m * decade < limit) cps.push_back(m * decade);
        }
    }
    cps.push_back(limit);
    return cps;
}

std::vector<double> parse_checkpoints(const std::vector<std::string>& items, bool time_axis) {
    std::vector<double> out;
    for (const auto& item : items) {
        if (time_axis) {
            out.push_back(std::chrono::duration<double, std::milli>(parse_duration(item)).count());
        } else {
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw FlagError("bad checkpoint '" + item + "'");
            }
        }
    }
    return out;
}

struct ExperimentFlags {
    std::string input;
    std::uint64_t plant_seed = 1;
    std::size_t reps = 10;
    std::uint64_t base_seed = 1;
    std::string time;
    std::size_t evaluations = 0;
    std::vector<std::string> checkpoints;
    std::string output;
    std::string summary;

    void add(CLI::App& app) {
        app.add_option("--input", input, "Series CSV (default: generate the planted benchmark)");
        app.add_option("--plant-seed", plant_seed, "Seed of the generated planted series")->capture_default_str();
        app.add_option("--reps", reps, "Repetitions (seeds) per method")->capture_default_str();
        app.add_option("--seed", base_seed, "First seed; repetition r uses seed + r")->capture_default_str();
        app.add_option("--time", time, "Wall-clock budget per run (e.g. 60s)");
        app.add_option("--evaluations", evaluations, "Fitness-evaluation budget per run (deterministic)");
        app.add_option("--checkpoints", checkpoints, "Checkpoints (durations, or counts with --evaluations)")
            ->delimiter(',');
        app.add_option("--output", output, "Per-run records CSV");
        app.add_option("--summary", summary, "Per-checkpoint summary CSV");
    }

    bench::ExperimentConfig build() const {
        bench::ExperimentConfig cfg;
        cfg.repetitions = reps;
        cfg.base_seed = base_seed;
        if (reps < 2) throw FlagError("--reps must be at least 2");
        if (!time.empty() && evaluations > 0) throw FlagError("give either --time or --evaluations, not both");
        if (evaluations > 0) {
            cfg.budget.evaluation_limit = evaluations;
            cfg.axis = bench::CheckpointAxis::evaluations;
        } else {
            cfg.budget.time_limit = parse_duration(time.empty() ? "10s" : time);
            cfg.axis = bench::CheckpointAxis::elapsed_ms;
        }
        const bool time_axis = cfg.axis == bench::CheckpointAxis::elapsed_ms;
        if (checkpoints.empty()) {
            const double limit = time_axis
                                     ? std::chrono::duration<double, std::milli>(*cfg.budget.time_limit).count()
                                     : static_cast<double>(evaluations);
            cfg.checkpoints = default_checkpoints(limit);
        } else {
            cfg.checkpoints = parse_checkpoints(checkpoints, time_axis);
        }
        return cfg;
    }

    TimeSeries load() const {
        if (!input.empty()) return read_csv(input);
        bench::PlantedSpec spec;
        spec.seed = plant_seed;
        return bench::generate_planted(spec).series;
    }
};

void print_summary(const bench::ExperimentTable& table, std::ostream& out, bool sweep) {
    const char* axis = table.axis == bench::CheckpointAxis::elapsed_ms ? "checkpoint_ms" : "evaluations";
    out << std::left << std::setw(8) << "method";
    if (sweep) out << std::setw(10) << "sigma" << std::setw(6) << "rho";
    out << std::setw(14) << axis << std::setw(14) << "median" << std::setw(14) << "p2.5" << std::setw(14) << "p97.5"
        << '\n';
    for (const auto& s : table.summary) {
        out << std::left << std::setw(8) << s.method;
        if (sweep) out << std::setw(10) << s.sigma << std::setw(6) << s.rho;
        out << std::setw(14) << s.checkpoint << std::setw(14) << format_fitness(s.median) << std::setw(14)
            << format_fitness(s.lower) << std::setw(14) << format_fitness(s.upper) << '\n';
    }
}

int bench_plant(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generate the planted-motif benchmark series", "plant"};
    bench::PlantedSpec spec;
    std::string output = "planted.csv";
    std::string truth = "planted_truth.csv";
    app.add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    app.add_option("--output", output, "Series CSV path")->capture_default_str();
    app.add_option("--truth", truth, "Ground-truth CSV path")->capture_default_str();
    app.add_option("--pattern-length", spec.pattern_length, "Square-wave length")->capture_default_str();
    app.add_option("--patterns", spec.patterns, "Distinct planted patterns")->capture_default_str();
    app.add_option("--reps", spec.reps_per_pattern, "Instances per pattern")->capture_default_str();
    app.add_option("--min-scale", spec.min_scale, "Shortest instance as a fraction of the pattern")
        ->capture_default_str();
    app.add_option("--motif-mass", spec.motif_mass, "Fraction of the series covered by instances")
        ->capture_default_str();
    app.add_option("--walk-std", spec.walk_step_std, "Random-walk step deviation")->capture_default_str();
    bool done = false;
    const int rc = parse_args(app, args, out, err, done);
    if (done) return rc;

    return guarded(err, [&] {
        try {
            spec.validate();
        } catch (const std::invalid_argument& e) {
            throw FlagError(e.what());
        }
        const auto planted = bench::generate_planted(spec);
        write_csv(planted.series, output);
        bench::write_ground_truth(planted.truth, truth);
        out << "wrote " << planted.series.length() << " samples to " << output << " and "
            << planted.truth.occurrences.size() << " occurrences to " << truth << '\n';
        return static_cast<int>(kOk);
    });
}

int bench_race(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Genetic search against uniform random search", "race"};
    TaskFlags task_flags;
    GaFlags ga_flags;
    ExperimentFlags exp_flags;
    task_flags.add(app, false);
    ga_flags.add(app, false);
    exp_flags.add(app);
    bool done = false;
    const int rc = parse_args(app, args, out, err, done);
    if (done) return rc;

    return guarded(err, [&] {
        const TaskSpec task = task_flags.build();
        const GaParams params = ga_flags.build();
        const auto cfg = exp_flags.build();
        const TimeSeries z = exp_flags.load();
        check_feasible(task, z);

        const auto table = bench::convergence_experiment(z, task, params, cfg);
        print_summary(table, out, false);
        const auto ga = table.final_values("ga");
        const auto rs = table.final_values("random");
        std::size_t wins = 0;
        std::size_t losses = 0;
        for (std::size_t i = 0; i < std::min(ga.size(), rs.size()); ++i) {
            if (ga[i] < rs[i]) ++wins;
            else if (ga[i] > rs[i]) ++losses;
        }
        const double ga_med = bench::median(ga);
        const double rs_med = bench::median(rs);
        out << "final checkpoint: ga median " << format_fitness(ga_med) << ", random median " << format_fitness(rs_med)
            << ", ratio " << format_fitness(ga_med / rs_med) << ", ga wins " << wins << "/" << (wins + losses)
            << ", sign test p = " << bench::sign_test_pvalue(wins, losses) << '\n';
        if (!exp_flags.output.empty()) bench::write_experiment_csv(table, exp_flags.output, false);
        if (!exp_flags.summary.empty()) bench::write_summary_csv(table, exp_flags.summary, false);
        return static_cast<int>(kOk);
    });
}

int bench_sweep(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Parameter sweep over sigma or the population size", "sweep"};
    TaskFlags task_flags;
    GaFlags ga_flags;
    ExperimentFlags exp_flags;
    std::string parameter = "sigma";
    std::vector<double> values;
    task_flags.add(app, false);
    ga_flags.add(app, false);
    exp_flags.add(app);
    app.add_option("--param", parameter, "Swept parameter")
        ->check(CLI::IsMember({"sigma", "rho"}))
        ->capture_default_str();
    app.add_option("--values", values, "Grid values (default: 1e-5..1 for sigma, 15..201 for rho)")
        ->delimiter(',');
    bool done = false;
    const int rc = parse_args(app, args, out, err, done);
    if (done) return rc;

    return guarded(err, [&] {
        const TaskSpec task = task_flags.build();
        const GaParams params = ga_flags.build();
        auto cfg = exp_flags.build();
        cfg.include_random_search = false;
        const bool sigma = parameter == "sigma";
        if (values.empty()) {
            values = sigma ? std::vector<double>{1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0}
                           : std::vector<double>{15, 25, 51, 101, 201};
        }
        for (double v : values) {
            if (sigma && !(v > 0.0)) throw FlagError("sigma values must be positive");
            if (!sigma && (v < 3 || std::fmod(v, 2.0) != 1.0))
                throw FlagError("population sizes must be odd integers >= 3");
        }
        const TimeSeries z = exp_flags.load();
        check_feasible(task, z);
        const auto table = bench::sweep_experiment(
            z, task, params, cfg, sigma ? bench::SweepParameter::sigma : bench::SweepParameter::rho, values);
        print_summary(table, out, true);
        if (!exp_flags.output.empty()) bench::write_experiment_csv(table, exp_flags.output, true);
        if (!exp_flags.summary.empty()) bench::write_summary_csv(table, exp_flags.summary, true);
        return static_cast<int>(kOk);
    });
}

int bench_score(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Score a discovery report against planted ground truth", "score"};
    std::string report_path;
    std::string truth_path;
    bench::RecoveryConfig rcfg;
    app.add_option("--report", report_path, "Report written by discover")->required();
    app.add_option("--truth", truth_path, "Ground-truth CSV written by plant")->required();
    app.add_option("--min-overlap", rcfg.min_overlap, "Hit threshold as a fraction of the shorter interval")
        ->capture_default_str();
    app.add_option("--min-hits", rcfg.min_hits, "Hits needed to recover a pattern (0: majority)")
        ->capture_default_str();
    bool done = false;
    const int rc = parse_args(app, args, out, err, done);
    if (done) return rc;

    return guarded(err, [&] {
        const MotifReport report = read_report(report_path);
        const auto truth = bench::read_ground_truth(truth_path);
        std::vector<std::vector<Interval>> groups;
        for (const auto& m : report.motifs) {
            std::vector<Interval> g;
            for (const auto& s : m.supports) g.push_back(s.gene.interval());
            groups.push_back(std::move(g));
        }
        const auto score = bench::recovery_score(groups, truth, rcfg);
        out << std::left << std::setw(7) << "motif";
        for (std::size_t p = 1; p <= score.pattern_count; ++p) out << std::setw(11) << ("pattern_" + std::to_string(p));
        out << "recovered\n";
        for (std::size_t i = 0; i < score.groups.size(); ++i) {
            const auto& g = score.groups[i];
            out << std::left << std::setw(7) << (i + 1);
            for (std::size_t h : g.hits_by_pattern) out << std::setw(11) << h;
            out << (g.recovered_pattern ? std::to_string(*g.recovered_pattern) : "-") << '\n';
        }
        const auto rec = score.recovered_patterns();
        out << "recovered patterns: " << rec.size() << "/" << score.pattern_count << '\n';
        return static_cast<int>(kOk);
    });
}

}  // namespace

std::chrono::nanoseconds parse_duration(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw FlagError("bad duration '" + text + "'");
    }
    const std::string unit = text.substr(used);
    double seconds = 0.0;
    if (unit.empty() || unit == "s") seconds = value;
    else if (unit == "ms") seconds = value / 1e3;
    else if (unit == "min") seconds = value * 60.0;
    else throw FlagError("bad duration unit in '" + text + "' (use ms, s or min)");
    if (!(seconds > 0.0) || !std::isfinite(seconds)) throw FlagError("duration must be positive: '" + text + "'");
    return std::chrono::nanoseconds(static_cast<std::int64_t>(std::llround(seconds * 1e9)));
}

int run_discover(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discover k motifs with support s in a time series", "discover"};
    TaskFlags task_flags;
    GaFlags ga_flags;
    std::string input;
    std::string output;
    std::string trace_path;
    std::string time;
    std::size_t generations = 0;
    bool progress = false;
    double progress_interval_ms = 500.0;
    app.add_option("--input", input, "Series CSV: one row per time step, one column per dimension")->required();
    task_flags.add(app, true);
    ga_flags.add(app);
    app.add_option("--time", time, "Wall-clock budget (ms/s/min suffix; bare numbers are seconds)");
    app.add_option("--generations", generations, "Generation budget (deterministic)");
    app.add_option("--output", output, "Report path (default: standard output)");
    app.add_option("--trace", trace_path, "Convergence trace CSV");
    app.add_flag("--progress", progress, "Print progress lines to standard error");
    app.add_option("--progress-interval", progress_interval_ms,
                   "Minimum milliseconds between progress lines (0: every generation)")
        ->capture_default_str();
    bool done = false;
    const int rc = parse_args(app, args, out, err, done);
    if (done) return rc;

    return guarded(err, [&] {
        const TaskSpec task = task_flags.build();
        GaParams params = ga_flags.build();
        if (!time.empty()) params.budget.time_limit = parse_duration(time);
        if (generations > 0) params.budget.generation_limit = generations;
        if (!params.budget.bounded()) params.budget.time_limit = std::chrono::seconds(60);

        const TimeSeries z = read_csv(input);
        check_feasible(task, z);

        double last_print = -1e300;
        Observer observer;
        if (progress) {
            observer = [&](const TraceRecord& r) {
                if (r.elapsed_ms - last_print < progress_interval_ms) return;
                last_print = r.elapsed_ms;
                err << "generation " << r.generation << "  elapsed " << std::fixed << std::setprecision(1)
                    << r.elapsed_ms << " ms  best " << std::defaultfloat << format_fitness(r.best_fitness)
                    << "  evaluations " << r.evaluations << '\n';
            };
        }

        EvolveResult result;
        {
            InterruptGuard guard;
            result = evolve(z, task, params, observer, &g_interrupted);
        }
        if (result.cancelled) err << "interrupted: reporting the best solution so far\n";

        const MotifReport report = build_report(z, task, params, result, input);
        if (output.empty()) out << report_to_string(report);
        else write_report(report, output);
        if (!trace_path.empty()) write_trace_csv(result.trace, trace_path);
        err << "fitness " << format_fitness(result.best_fitness) << " after " << result.generations
            << " generations (" << result.evaluations << " evaluations)\n";
        return static_cast<int>(kOk);
    });
}

int run_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    static const char* usage =
        "usage: genmotif bench <plant|race|sweep|score> [options]\n"
        "  plant   write the planted-motif series and its ground truth\n"
        "  race    compare the genetic search with random search\n"
        "  sweep   sweep sigma or the population size\n"
        "  score   score a discover report against ground truth\n";
    if (args.empty()) {
        err << usage;
        return kBadFlags;
    }
    const std::string& sub = args.front();
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (sub == "plant") return bench_plant(rest, out, err);
    if (sub == "race") return bench_race(rest, out, err);
    if (sub == "sweep") return bench_sweep(rest, out, err);
    if (sub == "score") return bench_score(rest, out, err);
    if (sub == "-h" || sub == "--help") {
        out << usage;
        return kOk;
    }
    err << "unknown bench command '" << sub << "'\n" << usage;
    return kBadFlags;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    static const char* usage =
        "usage: genmotif <command> [options]\n"
        "  discover   find motifs with support in a CSV time series\n"
        "  bench      planted-motif benchmark tools (plant, race, sweep, score)\n"
        "Run 'genmotif <command> --help' for the options of a command.\n";
    if (args.empty()) {
        err << usage;
        return kBadFlags;
    }
    const std::string& cmd = args.front();
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (cmd == "discover") return run_discover(rest, out, err);
    if (cmd == "bench") return run_bench(rest, out, err);
    if (cmd == "-h" || cmd == "--help") {
        out << usage;
        return kOk;
    }
    err << "unknown command '" << cmd << "'\n" << usage;
    return kBadFlags;
}

}  // namespace genmotif::cli
