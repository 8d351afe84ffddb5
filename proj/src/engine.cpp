#include "genmotif/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace genmotif {

namespace {

// Euclidean modulo on integer-valued doubles; stays exact for huge Cauchy jumps.
double wrap(double x, double modulus) {
    if (!std::isfinite(x)) return 0.0;
    double r = std::fmod(x, modulus);
    if (r < 0.0) r += modulus;
    if (r >= modulus) r = 0.0;
    return r;
}

double uniform(Rng& rng, double lo, double hi) {
    if (!(hi > lo)) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

}  // namespace

void TaskSpec::validate(std::size_t series_length) const {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (support < 2) throw std::invalid_argument("support must be at least 2");
    if (min_length < 1) throw std::invalid_argument("minimum segment length must be at least 1");
    if (min_length > max_length) throw std::invalid_argument("minimum segment length exceeds the maximum");
    if (fitness.index == ValidityIndex::davies_bouldin && k < 2)
        throw std::invalid_argument("the Davies-Bouldin index needs k >= 2");
    if (fitness.index == ValidityIndex::silhouette && k < 2)
        throw std::invalid_argument("the silhouette index needs k >= 2");
    if (fitness.overlap_tolerance < 0.0 || fitness.overlap_tolerance >= 1.0)
        throw std::invalid_argument("overlap tolerance must lie in [0, 1)");
    const auto n = static_cast<std::int64_t>(series_length);
    if (max_length > n) {
        throw InfeasibleTask("maximum segment length " + std::to_string(max_length) +
                             " exceeds the series length " + std::to_string(n));
    }
    const auto needed = static_cast<std::int64_t>(segment_count()) * min_length;
    if (needed > n) {
        throw InfeasibleTask("k*s*l_min = " + std::to_string(needed) + " exceeds the series length " +
                             std::to_string(n));
    }
}

void GaParams::validate() const {
    if (population_size < 3 || population_size % 2 == 0)
        throw std::invalid_argument("population size must be an odd integer >= 3");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
    if (!budget.bounded()) throw std::invalid_argument("no time, generation or evaluation limit given");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (tournament_selection && tournament_size < 1)
        throw std::invalid_argument("tournament size must be at least 1");
}

double RunTrace::best_at_ms(double elapsed_ms) const {
    double best = kWorstFitness;
    for (const auto& r : records) {
        if (r.elapsed_ms > elapsed_ms) break;
        best = r.best_fitness;
    }
    return best;
}

double RunTrace::best_at_evaluations(std::size_t evaluations) const {
    double best = kWorstFitness;
    for (const auto& r : records) {
        if (r.evaluations > evaluations) break;
        best = r.best_fitness;
    }
    return best;
}

bool out_of_time(const BudgetState& state, const Budget& budget) {
    if (budget.generation_limit && state.generations >= *budget.generation_limit) return true;
    if (budget.evaluation_limit && state.evaluations >= *budget.evaluation_limit) return true;
    if (budget.time_limit) {
        const double limit = std::chrono::duration<double>(*budget.time_limit).count();
        if (state.elapsed_s >= limit) return true;
        if (state.iteration_estimate_s && state.elapsed_s + *state.iteration_estimate_s > limit) return true;
    }
    return false;
}

BudgetClock::BudgetClock() : origin_(Clock::now()), last_mark_(origin_) {}

void BudgetClock::start_iterations() { last_mark_ = Clock::now(); }

void BudgetClock::finish_iteration() {
    const auto now = Clock::now();
    const double took = std::chrono::duration<double>(now - last_mark_).count();
    last_mark_ = now;
    estimate_ = estimate_ ? (1.0 - kSmoothing) * *estimate_ + kSmoothing * took : took;
}

double BudgetClock::elapsed_s() const {
    return std::chrono::duration<double>(Clock::now() - origin_).count();
}

double cauchy_sample(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double num = normal(rng);
    double den = 0.0;
    do {
        den = std::abs(normal(rng));
    } while (den < 1e-300);
    return num / den;
}

Solution new_solution(Rng& rng, std::int64_t n, std::int64_t l_min, std::int64_t l_max, std::size_t genes,
                      double overlap_tolerance, std::size_t retry_cap) {
    if (l_min < 1 || l_min > l_max || l_max > n)
        throw std::invalid_argument("new_solution: need 1 <= l_min <= l_max <= n");
    Solution x(genes);
    for (std::size_t attempt = 0; attempt < retry_cap; ++attempt) {
        for (auto& g : x) {
            g.indicator = uniform(rng, 0.0, 1.0);
            g.length = std::min(l_max, static_cast<std::int64_t>(std::floor(
                                           uniform(rng, static_cast<double>(l_min), static_cast<double>(l_max + 1)))));
            const std::int64_t last_start = n - g.length + 1;
            g.start = std::clamp<std::int64_t>(
                static_cast<std::int64_t>(std::floor(uniform(rng, 1.0, static_cast<double>(last_start)))), 1,
                last_start);
        }
        if (!x.empty() && !some_overlap(x, overlap_tolerance)) return x;
    }
    throw InfeasibleTask("no overlap-free placement of " + std::to_string(genes) + " segments of length [" +
                         std::to_string(l_min) + ", " + std::to_string(l_max) + "] in " + std::to_string(n) +
                         " samples after " + std::to_string(retry_cap) + " attempts");
}

std::pair<Solution, Solution> crossover(Solution a, Solution b, Rng& rng) {
    if (a.size() != b.size()) throw std::invalid_argument("crossover: parents differ in gene count");
    const double p = 1.0 / static_cast<double>(a.size());
    for (std::size_t u = 0; u < a.size(); ++u) {
        if (coin(rng, p)) std::swap(a[u], b[u]);
    }
    return {std::move(a), std::move(b)};
}

Gene mutate_gene(Gene gene, double sigma, std::int64_t n, std::int64_t l_min, std::int64_t l_max,
                 const CauchyDraws& draws) {
    const std::int64_t r = l_max + 1 - l_min;
    gene.indicator = wrap(gene.indicator + sigma * draws.indicator, 1.0);

    // Lengths live in a ring of r admissible values starting at l_min.
    const double dl = std::round(sigma * static_cast<double>(r) * draws.length);
    gene.length = l_min + static_cast<std::int64_t>(
                              wrap(static_cast<double>(gene.length - l_min) + dl, static_cast<double>(r)));

    // Starts use the mutated length and a zero-based offset ring of n-l+1 positions.
    const std::int64_t positions = n - gene.length + 1;
    const double df = std::round(sigma * static_cast<double>(n - gene.length) * draws.start);
    gene.start = 1 + static_cast<std::int64_t>(
                         wrap(static_cast<double>(gene.start - 1) + df, static_cast<double>(positions)));
    return gene;
}

Solution mutate(Solution x, double sigma, std::int64_t n, std::int64_t l_min, std::int64_t l_max, Rng& rng) {
    if (x.empty()) return x;
    const double p = 1.0 / static_cast<double>(x.size());
    for (auto& g : x) {
        if (!coin(rng, p)) continue;
        CauchyDraws draws{};
        draws.indicator = cauchy_sample(rng);
        draws.length = cauchy_sample(rng);
        draws.start = cauchy_sample(rng);
        g = mutate_gene(g, sigma, n, l_min, l_max, draws);
    }
    std::shuffle(x.begin(), x.end(), rng);
    return x;
}

bool gene_in_bounds(const Gene& g, std::int64_t n, std::int64_t l_min, std::int64_t l_max) {
    return g.length >= l_min && g.length <= l_max && g.start >= 1 && g.start <= n - g.length + 1 &&
           g.indicator >= 0.0 && g.indicator < 1.0;
}

namespace {

std::size_t pick_parent(Rng& rng, const std::vector<double>& fitness, const GaParams& params) {
    std::uniform_int_distribution<std::size_t> any(0, fitness.size() - 1);
    std::size_t best = any(rng);
    if (!params.tournament_selection) return best;
    for (std::size_t t = 1; t < params.tournament_size; ++t) {
        const std::size_t other = any(rng);
        if (fitness[other] < fitness[best]) best = other;
    }
    return best;
}

}  // namespace

EvolveResult evolve(const TimeSeries& z, const TaskSpec& task, const GaParams& params, const Observer& observer,
                    const std::atomic<bool>* cancel) {
    task.validate(z.length());
    params.validate();

    BudgetClock clock;
    Rng rng(params.seed);
    const auto n = static_cast<std::int64_t>(z.length());
    const std::size_t ks = task.segment_count();
    const std::size_t rho = params.population_size;
    const auto max_len = static_cast<std::size_t>(task.max_length);

    std::vector<Solution> population;
    population.reserve(rho);
    for (std::size_t i = 0; i < rho; ++i) {
        population.push_back(new_solution(rng, n, task.min_length, task.max_length, ks,
                                          task.fitness.overlap_tolerance, params.init_retry_cap));
    }

    EvolveResult result;
    result.best = population.front();
    std::vector<double> fitness(rho, kWorstFitness);
    const auto threads = static_cast<int>(params.threads);
    clock.start_iterations();

    while (true) {
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1)
        for (std::size_t i = 0; i < rho; ++i) {
            fitness[i] = goodness(z, population[i], task.fitness, max_len, task.support);
        }
        result.evaluations += rho;

        std::size_t i_best = 0;
        double g_best = kWorstFitness;
        for (std::size_t i = 0; i < rho; ++i) {
            if (fitness[i] < g_best) {
                g_best = fitness[i];
                i_best = i;
            }
        }
        const bool improved = g_best < result.best_fitness;
        if (improved) {
            result.best_fitness = g_best;
            result.best = population[i_best];
        }
        ++result.generations;
        clock.finish_iteration();

        const TraceRecord record{clock.elapsed_ms(), result.generations - 1, result.best_fitness,
                                 result.evaluations};
        const BudgetState state{clock.elapsed_s(), clock.iteration_estimate_s(), result.generations,
                                result.evaluations};
        const bool exhausted = out_of_time(state, params.budget);
        if (observer) observer(record);
        const bool cancelled = cancel && cancel->load(std::memory_order_relaxed);
        const bool stop = cancelled || exhausted;
        if (improved || result.generations == 1 || stop) result.trace.records.push_back(record);
        if (stop) {
            result.cancelled = cancelled;
            break;
        }

        std::vector<Solution> next;
        next.reserve(rho);
        next.push_back(population[i_best]);
        for (std::size_t u = 0; u < (rho - 1) / 2; ++u) {
            const std::size_t i = pick_parent(rng, fitness, params);
            const std::size_t j = pick_parent(rng, fitness, params);
            auto [a, b] = crossover(population[i], population[j], rng);
            next.push_back(mutate(std::move(a), params.sigma, n, task.min_length, task.max_length, rng));
            next.push_back(mutate(std::move(b), params.sigma, n, task.min_length, task.max_length, rng));
        }
        population = std::move(next);
    }

    result.elapsed_ms = clock.elapsed_ms();
    return result;
}

}  // namespace genmotif
