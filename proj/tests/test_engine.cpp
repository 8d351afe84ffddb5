#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <random>

#include "genmotif/engine.hpp"

using namespace genmotif;
using Catch::Approx;

namespace {

TimeSeries random_walk(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 1.0);
    std::vector<double> v(n);
    double level = 0.0;
    for (double& x : v) x = level += step(rng);
    return TimeSeries::univariate(v);
}

TaskSpec small_task() {
    TaskSpec t;
    t.k = 2;
    t.support = 3;
    t.min_length = 8;
    t.max_length = 12;
    return t;
}

bool same_genes(const Solution& a, const Solution& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

auto sorted_genes(Solution s) {
    std::sort(s.begin(), s.end(), [](const Gene& x, const Gene& y) {
        return std::tie(x.start, x.length, x.indicator) < std::tie(y.start, y.length, y.indicator);
    });
    return s;
}

}  // namespace

TEST_CASE("cauchy_sample", "[engine]") {
    Rng rng(1);
    std::vector<double> draws(100000);
    for (double& x : draws) x = cauchy_sample(rng);

    std::vector<double> sorted = draws;
    std::nth_element(sorted.begin(), sorted.begin() + 50000, sorted.end());
    CHECK(std::abs(sorted[50000]) <= 0.02);

    const auto tail = std::count_if(draws.begin(), draws.end(), [](double x) { return std::abs(x) > 10.0; });
    const double expected = 1.0 - 2.0 / M_PI * std::atan(10.0);
    CHECK(expected == Approx(0.0635).margin(5e-4));
    CHECK(static_cast<double>(tail) / 1e5 == Approx(expected).margin(0.005));

    Rng again(1);
    for (std::size_t i = 0; i < 1000; ++i) REQUIRE(cauchy_sample(again) == draws[i]);
}

TEST_CASE("new_solution", "[engine]") {
    Rng rng(4);
    SECTION("single gene always valid") {
        for (int i = 0; i < 1000; ++i) {
            const auto s = new_solution(rng, 100, 5, 20, 1);
            REQUIRE(s.size() == 1);
            REQUIRE(gene_in_bounds(s[0], 100, 5, 20));
        }
    }
    SECTION("solutions never overlap") {
        for (int i = 0; i < 200; ++i) {
            const auto s = new_solution(rng, 500, 10, 20, 8);
            REQUIRE(s.size() == 8);
            REQUIRE_FALSE(some_overlap(s, 0.0));
            for (const auto& g : s) REQUIRE(gene_in_bounds(g, 500, 10, 20));
        }
    }
    SECTION("tight packing either succeeds or hits the cap") {
        // n = k*s*l_min: only the exact tiling works
        try {
            const auto s = new_solution(rng, 6, 2, 2, 3, 0.0, 100000);
            REQUIRE_FALSE(some_overlap(s, 0.0));
            auto starts = sorted_genes(s);
            CHECK(starts[0].start == 1);
            CHECK(starts[1].start == 3);
            CHECK(starts[2].start == 5);
        } catch (const InfeasibleTask&) {
            SUCCEED("retry cap reached");
        }
        CHECK_THROWS_AS(new_solution(rng, 30, 10, 10, 4, 0.0, 1000), InfeasibleTask);
    }
    SECTION("lengths are uniform over the range") {
        std::map<std::int64_t, int> counts;
        for (int i = 0; i < 10000; ++i) ++counts[new_solution(rng, 10000, 50, 60, 1)[0].length];
        REQUIRE(counts.size() == 11);
        const double p = 1.0 / 11.0;
        const double sd = std::sqrt(10000 * p * (1 - p));
        double chi2 = 0.0;
        for (const auto& [len, c] : counts) {
            CHECK(std::abs(c - 10000 * p) < 5 * sd);
            chi2 += (c - 10000 * p) * (c - 10000 * p) / (10000 * p);
        }
        CHECK(chi2 < 29.6);  // 0.999 quantile, 10 degrees of freedom
    }
}

TEST_CASE("crossover", "[engine]") {
    Rng rng(12);
    const auto a = new_solution(rng, 1000, 5, 10, 10);
    const auto b = new_solution(rng, 1000, 5, 10, 10);

    SECTION("equal parents pass through") {
        for (int i = 0; i < 100; ++i) {
            const auto [x, y] = crossover(a, a, rng);
            REQUIRE(same_genes(x, a));
            REQUIRE(same_genes(y, a));
        }
    }
    SECTION("swaps are position-aligned and preserve the multiset") {
        double swapped = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const auto [x, y] = crossover(a, b, rng);
            for (std::size_t p = 0; p < a.size(); ++p) {
                const bool kept = x[p] == a[p] && y[p] == b[p];
                const bool swap = x[p] == b[p] && y[p] == a[p];
                REQUIRE((kept || swap));
                swapped += swap ? 1.0 : 0.0;
            }
        }
        CHECK(swapped / 10000.0 == Approx(1.0).margin(0.1));
    }
}

TEST_CASE("mutation", "[engine]") {
    SECTION("indicator wraps around") {
        const Gene g{10, 20, 0.95};
        const auto m = mutate_gene(g, 0.1, 1000, 10, 30, {1.0, 0.0, 0.0});
        CHECK(m.indicator == Approx(0.05));
        CHECK(m.length == 20);
        CHECK(m.start == 10);
    }
    SECTION("length and start wrap inside their ranges") {
        const Gene g{990, 30, 0.5};
        const auto m = mutate_gene(g, 1.0, 1000, 10, 30, {0.0, 0.5, 0.5});
        CHECK(gene_in_bounds(m, 1000, 10, 30));
    }
    SECTION("vanishing sigma leaves the gene values alone") {
        Rng rng(3);
        const auto x = new_solution(rng, 1000, 5, 10, 10);
        for (int i = 0; i < 100; ++i) {
            const auto before = sorted_genes(x);
            const auto after = sorted_genes(mutate(x, 1e-12, 1000, 5, 10, rng));
            for (std::size_t g = 0; g < before.size(); ++g) {
                REQUIRE(after[g].start == before[g].start);
                REQUIRE(after[g].length == before[g].length);
                REQUIRE(after[g].indicator == Approx(before[g].indicator).margin(1e-6));
            }
        }
    }
}

TEST_CASE("mutated genes stay in bounds", "[engine][property]") {
    Rng rng(31337);
    std::uniform_int_distribution<std::int64_t> lmin_dist(1, 40);
    std::uniform_int_distribution<std::int64_t> width_dist(0, 30);
    const double sigmas[] = {1e-5, 1e-2, 1e-1, 1.0, 10.0};
    std::size_t checked = 0;
    while (checked < 100000) {
        const auto l_min = lmin_dist(rng);
        const auto l_max = l_min + width_dist(rng);
        const std::int64_t n = l_max * 40;
        auto x = new_solution(rng, n, l_min, l_max, 10);
        for (int step = 0; step < 50; ++step) {
            x = mutate(std::move(x), sigmas[checked % 5], n, l_min, l_max, rng);
            for (const auto& g : x) REQUIRE(gene_in_bounds(g, n, l_min, l_max));
            checked += x.size();
        }
    }
}

TEST_CASE("out_of_time", "[engine]") {
    using namespace std::chrono_literals;
    Budget budget;
    budget.time_limit = 60s;
    CHECK_FALSE(out_of_time({0.0, std::nullopt, 0, 0}, Budget{std::chrono::nanoseconds(3600s), {}, {}}));
    CHECK(out_of_time({60.0, 0.001, 10, 10}, budget));
    CHECK(out_of_time({61.0, std::nullopt, 10, 10}, budget));
    CHECK(out_of_time({55.0, 10.0, 10, 10}, budget));
    CHECK_FALSE(out_of_time({55.0, 1.0, 10, 10}, budget));

    Budget gens;
    gens.generation_limit = 3;
    CHECK_FALSE(out_of_time({1e9, 1e9, 2, 0}, gens));
    CHECK(out_of_time({0.0, std::nullopt, 3, 0}, gens));

    Budget evals;
    evals.evaluation_limit = 100;
    CHECK(out_of_time({0.0, std::nullopt, 0, 100}, evals));
}

TEST_CASE("task and parameter validation", "[engine]") {
    auto task = small_task();
    CHECK_NOTHROW(task.validate(100));
    CHECK_THROWS_AS(task.validate(47), InfeasibleTask);
    task.min_length = 20;
    CHECK_THROWS_AS(task.validate(1000), std::invalid_argument);

    GaParams p;
    p.budget.generation_limit = 1;
    CHECK_NOTHROW(p.validate());
    p.population_size = 50;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.population_size = 51;
    p.sigma = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.sigma = 0.01;
    p.budget = {};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("evolve", "[engine]") {
    const auto z = random_walk(600, 9);
    const auto task = small_task();
    GaParams p;
    p.seed = 5;

    SECTION("one generation is one round of random search") {
        p.budget.generation_limit = 1;
        const auto r = evolve(z, task, p);
        CHECK(r.generations == 1);
        CHECK(r.evaluations == p.population_size);

        Rng rng(p.seed);
        double best = kWorstFitness;
        for (std::size_t i = 0; i < p.population_size; ++i) {
            const auto s = new_solution(rng, 600, task.min_length, task.max_length, task.segment_count());
            best = std::min(best, goodness(z, s, task.fitness, 12, task.support));
        }
        CHECK(r.best_fitness == best);
    }
    SECTION("trace is monotone and every generation is observed") {
        p.budget.generation_limit = 300;
        std::vector<TraceRecord> seen;
        const auto r = evolve(z, task, p, [&](const TraceRecord& rec) { seen.push_back(rec); });
        REQUIRE(seen.size() == 300);
        for (std::size_t i = 1; i < seen.size(); ++i) {
            REQUIRE(seen[i].best_fitness <= seen[i - 1].best_fitness);
            REQUIRE(seen[i].generation == i);
        }
        for (std::size_t i = 1; i < r.trace.records.size(); ++i)
            REQUIRE(r.trace.records[i].best_fitness <= r.trace.records[i - 1].best_fitness);
        CHECK(r.trace.records.back().generation == 299);
        CHECK(r.best_fitness == seen.back().best_fitness);
        CHECK(goodness(z, r.best, task.fitness, 12, task.support) == r.best_fitness);
        CHECK(r.best_fitness < r.trace.records.front().best_fitness);
    }
    SECTION("fixed seed and generation budget are deterministic") {
        p.budget.generation_limit = 100;
        const auto a = evolve(z, task, p);
        const auto b = evolve(z, task, p);
        CHECK(a.best_fitness == b.best_fitness);
        CHECK(same_genes(a.best, b.best));
        p.threads = 2;
        const auto c = evolve(z, task, p);
        CHECK(c.best_fitness == a.best_fitness);
        CHECK(same_genes(c.best, a.best));
    }
    SECTION("cancellation stops after the current generation") {
        p.budget.generation_limit = 1000000;
        std::atomic<bool> cancel{false};
        const auto r = evolve(
            z, task, p, [&](const TraceRecord& rec) { if (rec.generation == 9) cancel = true; }, &cancel);
        CHECK(r.cancelled);
        CHECK(r.generations == 10);
    }
    SECTION("time budget is respected") {
        p.budget.time_limit = std::chrono::milliseconds(200);
        const auto r = evolve(z, task, p);
        CHECK(r.elapsed_ms < 400.0);
        CHECK(r.generations > 1);
    }
    SECTION("tournament selection runs") {
        p.tournament_selection = true;
        p.budget.generation_limit = 50;
        CHECK(std::isfinite(evolve(z, task, p).best_fitness));
    }
}

TEST_CASE("RunTrace lookups", "[engine]") {
    RunTrace t;
    t.records = {{1.0, 0, 5.0, 51}, {10.0, 3, 2.0, 204}, {20.0, 9, 1.0, 510}};
    CHECK(std::isinf(t.best_at_ms(0.5)));
    CHECK(t.best_at_ms(1.0) == 5.0);
    CHECK(t.best_at_ms(15.0) == 2.0);
    CHECK(t.best_at_evaluations(600) == 1.0);
}
