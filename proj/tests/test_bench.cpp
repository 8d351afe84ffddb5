#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <set>

#include "genmotif/bench.hpp"

using namespace genmotif;
using namespace genmotif::bench;
using Catch::Approx;

namespace {

PlantedSpec small_spec(std::uint64_t seed = 1) {
    PlantedSpec spec;
    spec.pattern_length = 20;
    spec.reps_per_pattern = 10;
    spec.seed = seed;
    return spec;
}

TaskSpec small_task() {
    TaskSpec t;
    t.k = 2;
    t.support = 3;
    t.min_length = 15;
    t.max_length = 20;
    return t;
}

void check_disjoint_and_in_bounds(const PlantedSeries& p) {
    auto occ = p.truth.occurrences;
    std::sort(occ.begin(), occ.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < occ.size(); ++i) {
        REQUIRE(occ[i].start >= 1);
        REQUIRE(occ[i].start + occ[i].length - 1 <= static_cast<std::int64_t>(p.series.length()));
        if (i > 0) REQUIRE(occ[i - 1].start + occ[i - 1].length <= occ[i].start);
    }
}

}  // namespace

TEST_CASE("planted series with default settings", "[bench]") {
    const PlantedSpec spec;
    CHECK(spec.series_length() == 58000);
    CHECK(spec.min_instance_length() == 53);

    const auto p = generate_planted(spec);
    CHECK(p.series.length() == 58000);
    CHECK(p.series.dims() == 1);
    REQUIRE(p.truth.occurrences.size() == 100);
    CHECK(p.truth.pattern_count() == 2);

    std::int64_t mass = 0;
    std::size_t per_pattern[2] = {0, 0};
    for (const auto& o : p.truth.occurrences) {
        CHECK(o.length >= 52);
        CHECK(o.length <= 58);
        REQUIRE((o.pattern == 1 || o.pattern == 2));
        ++per_pattern[o.pattern - 1];
        mass += o.length;
    }
    CHECK(per_pattern[0] == 50);
    CHECK(per_pattern[1] == 50);
    CHECK(static_cast<double>(mass) / 58000.0 == Approx(0.10).margin(0.02));
    check_disjoint_and_in_bounds(p);
}

TEST_CASE("planted square waves", "[bench]") {
    const auto low_high = square_wave(6, 1);
    const auto high_low = square_wave(6, 2);
    CHECK(low_high.front() < low_high.back());
    CHECK(high_low.front() > high_low.back());
}

TEST_CASE("planted generator properties", "[bench][property]") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto spec = small_spec(seed);
        spec.min_scale = seed % 2 == 0 ? 1.0 : 0.5;
        const auto p = generate_planted(spec);
        check_disjoint_and_in_bounds(p);
        for (const auto& o : p.truth.occurrences) {
            if (spec.min_scale == 1.0) REQUIRE(o.length == spec.pattern_length);
            REQUIRE(o.length >= spec.min_instance_length());
        }
        const auto again = generate_planted(spec);
        REQUIRE(std::equal(p.series.values().begin(), p.series.values().end(), again.series.values().begin()));
    }
}

TEST_CASE("ground truth round-trips through CSV", "[bench]") {
    const auto p = generate_planted(small_spec());
    const auto path = (std::filesystem::temp_directory_path() / "genmotif_truth_test.csv").string();
    write_ground_truth(p.truth, path);
    const auto back = read_ground_truth(path);
    std::filesystem::remove(path);
    REQUIRE(back.occurrences.size() == p.truth.occurrences.size());
    for (std::size_t i = 0; i < back.occurrences.size(); ++i) {
        CHECK(back.occurrences[i].pattern == p.truth.occurrences[i].pattern);
        CHECK(back.occurrences[i].start == p.truth.occurrences[i].start);
        CHECK(back.occurrences[i].length == p.truth.occurrences[i].length);
    }
}

TEST_CASE("random_search", "[bench]") {
    const auto p = generate_planted(small_spec());
    const auto task = small_task();

    SECTION("a single evaluation returns that solution") {
        Budget b;
        b.evaluation_limit = 1;
        Rng rng(3);
        const auto r = random_search(p.series, task, b, rng);
        CHECK(r.evaluations == 1);
        Rng replay(3);
        const auto s = new_solution(replay, static_cast<std::int64_t>(p.series.length()), 15, 20, 6);
        CHECK(std::equal(r.best.begin(), r.best.end(), s.begin()));
        CHECK(r.best_fitness == goodness(p.series, s, task.fitness, 20, 3));
    }
    SECTION("trace is monotone and runs are reproducible") {
        Budget b;
        b.evaluation_limit = 5000;
        Rng a(9);
        Rng c(9);
        const auto r1 = random_search(p.series, task, b, a, {}, nullptr, 100);
        const auto r2 = random_search(p.series, task, b, c, {}, nullptr, 100);
        CHECK(r1.evaluations == 5000);
        CHECK(r1.best_fitness == r2.best_fitness);
        for (std::size_t i = 1; i < r1.trace.records.size(); ++i)
            REQUIRE(r1.trace.records[i].best_fitness <= r1.trace.records[i - 1].best_fitness);
    }
}

TEST_CASE("recovery_score", "[bench]") {
    PlantedGroundTruth truth;
    for (int i = 0; i < 5; ++i) truth.occurrences.push_back({1, 1000 + 200 * i, 100});
    for (int i = 0; i < 5; ++i) truth.occurrences.push_back({2, 5000 + 200 * i, 100});

    SECTION("exact placement") {
        Solution sol;
        for (int i = 0; i < 5; ++i) sol.push_back({1000 + 200 * i, 100, 0.1 + 0.01 * i});
        for (int i = 0; i < 5; ++i) sol.push_back({3000 + 200 * i, 100, 0.6 + 0.01 * i});
        const auto rep = recovery_score(sol, truth, 5);
        REQUIRE(rep.groups.size() == 2);
        CHECK(rep.groups[0].hits_by_pattern == std::vector<std::size_t>{5, 0});
        CHECK(rep.groups[0].recovered_pattern == std::optional<std::size_t>{1});
        CHECK(rep.groups[1].hits_by_pattern == std::vector<std::size_t>{0, 0});
        CHECK_FALSE(rep.groups[1].recovered_pattern);
        CHECK(rep.recovered_patterns() == std::vector<std::size_t>{1});
        CHECK_FALSE(rep.all_recovered());
    }
    SECTION("overlap boundary") {
        const std::vector<std::vector<Interval>> just_under{{{1051, 100}}};
        CHECK(recovery_score(just_under, truth).groups[0].hits_by_pattern[0] == 0);
        const std::vector<std::vector<Interval>> exactly_half{{{1050, 100}}};
        CHECK(recovery_score(exactly_half, truth).groups[0].hits_by_pattern[0] == 1);
    }
    SECTION("majority rule") {
        std::vector<std::vector<Interval>> groups(1);
        for (int i = 0; i < 3; ++i) groups[0].push_back({5000 + 200 * i, 100});
        groups[0].push_back({9000, 50});
        groups[0].push_back({9500, 50});
        auto rep = recovery_score(groups, truth);
        CHECK(rep.groups[0].recovered_pattern == std::optional<std::size_t>{2});
        groups[0][2] = {9900, 50};
        rep = recovery_score(groups, truth);
        CHECK_FALSE(rep.groups[0].recovered_pattern);
        RecoveryConfig lenient;
        lenient.min_hits = 2;
        CHECK(recovery_score(groups, truth, lenient).groups[0].recovered_pattern == std::optional<std::size_t>{2});
    }
}

TEST_CASE("summary statistics", "[bench]") {
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 2, 3}) == 2.5);
    CHECK(percentile({1, 2, 3, 4, 5}, 0.025) == Approx(1.1));
    CHECK(percentile({1, 2, 3, 4, 5}, 0.975) == Approx(4.9));
    CHECK(percentile({7}, 0.3) == 7.0);

    CHECK(sign_test_pvalue(10, 0) == Approx(2.0 / 1024.0));
    CHECK(sign_test_pvalue(0, 10) == Approx(2.0 / 1024.0));
    CHECK(sign_test_pvalue(9, 1) == Approx(22.0 / 1024.0));
    CHECK(sign_test_pvalue(8, 2) == Approx(112.0 / 1024.0));
    CHECK(sign_test_pvalue(5, 5) == 1.0);
    CHECK(sign_test_pvalue(0, 0) == 1.0);
}

TEST_CASE("convergence experiments", "[bench]") {
    const auto p = generate_planted(small_spec());
    const auto task = small_task();
    GaParams params;
    ExperimentConfig cfg;
    cfg.repetitions = 3;
    cfg.axis = CheckpointAxis::evaluations;
    cfg.budget.evaluation_limit = 5100;
    cfg.checkpoints = {51, 510, 5100};
    params.budget = cfg.budget;

    const auto a = convergence_experiment(p.series, task, params, cfg);
    const auto b = convergence_experiment(p.series, task, params, cfg);
    REQUIRE(a.records.size() == 3 * 3 * 2);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].method == b.records[i].method);
        CHECK(a.records[i].seed == b.records[i].seed);
        CHECK(a.records[i].best_fitness == b.records[i].best_fitness);
    }
    CHECK(a.final_values("ga").size() == 3);
    CHECK(a.final_values("random").size() == 3);

    for (const auto& s : a.summary) {
        CHECK(s.lower <= s.median);
        CHECK(s.median <= s.upper);
        CHECK(s.runs == 3);
    }

    const auto sweep = sweep_experiment(p.series, task, params, cfg, SweepParameter::sigma, {1e-1, 1e-3});
    CHECK(sweep.final_values("ga", 1e-1).size() == 3);
    CHECK(sweep.final_values("ga", 1e-3).size() == 3);
    CHECK(sweep.final_values("random").empty());

    const auto rho = sweep_experiment(p.series, task, params, cfg, SweepParameter::rho, {15, 25});
    CHECK(rho.final_values("ga", std::nullopt, 15).size() == 3);
}

TEST_CASE("GA beats random search at matched evaluation counts", "[bench]") {
    const auto p = generate_planted(small_spec());
    const auto task = small_task();
    GaParams params;
    ExperimentConfig cfg;
    cfg.repetitions = 10;
    cfg.axis = CheckpointAxis::evaluations;
    cfg.budget.evaluation_limit = 51 * 400;
    cfg.checkpoints = {51.0 * 400};
    params.budget = cfg.budget;
    const auto t = convergence_experiment(p.series, task, params, cfg);
    const auto ga = t.final_values("ga");
    const auto rs = t.final_values("random");
    std::size_t wins = 0;
    std::size_t losses = 0;
    for (std::size_t i = 0; i < ga.size(); ++i) {
        if (ga[i] < rs[i]) ++wins;
        else if (ga[i] > rs[i]) ++losses;
    }
    CHECK(median(ga) < median(rs));
    CHECK(sign_test_pvalue(wins, losses) < 0.05);
}
