/// \file evolve.hpp
/// \brief Real-valued genetic algorithm over ODE coefficient space.
///
/// Stochastic uniform selection on rank-scaled losses, intermediate
/// crossover, adaptive feasible mutation with step size annealed by
/// generation progress, and elitism.  Fully deterministic for a fixed
/// seed: the driver owns the only RNG and fitness evaluation is pure.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "odedisc/errors.hpp"
#include "odedisc/gensol.hpp"
#include "odedisc/rng.hpp"

namespace odedisc {

struct GAConfig {
    int population_size = 750;
    int max_generations = 300;
    double function_tolerance = 1e-28;
    double lower_bound = -10.0;
    double upper_bound = 10.0;
    double crossover_rate = 0.8;
    double mutation_rate = 0.1;
    double elite_fraction = 0.05;
    std::uint64_t seed = 0;

    void validate() const {
        if (population_size < 2)
            throw InvalidConfig("population_size must be >= 2");
        if (max_generations < 1)
            throw InvalidConfig("max_generations must be >= 1");
        if (!(lower_bound < upper_bound))
            throw InvalidConfig("lower_bound must be < upper_bound");
        for (double r : {crossover_rate, mutation_rate, elite_fraction})
            if (!(r >= 0.0 && r <= 1.0))
                throw InvalidConfig("rates must lie in [0, 1]");
        if (!(function_tolerance >= 0.0))
            throw InvalidConfig("function_tolerance must be >= 0");
    }
};

/// Table-2 defaults: 750 x 300, tolerance 1e-28, bounds +-10.
inline GAConfig paper_ga_config() { return GAConfig{}; }

/// Reduced profile for CI-speed runs.
inline GAConfig ci_ga_config() {
    GAConfig cfg;
    cfg.population_size = 200;
    cfg.max_generations = 100;
    return cfg;
}

struct GAResult {
    CoefficientVector best_coefficients;
    double best_loss = kFitnessPenalty;
    int generations_run = 0;
    std::vector<double> loss_history;  ///< best-so-far per generation
};

/// One index per selection step: ranks laid as proportional segments on a
/// line, sampled with uniform spacing from a single random offset.  Scaled
/// expectation is 1/sqrt(rank), averaged over ties so equal losses get
/// equal expectation.
template <typename R>
std::vector<int> stochastic_uniform_selection(const std::vector<double>& losses,
                                              int count, R& rng) {
    const int n = static_cast<int>(losses.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return losses[a] < losses[b]; });

    std::vector<double> scaled(n, 0.0);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j < n && losses[order[j]] == losses[order[i]]) ++j;
        double mean = 0.0;
        for (int r = i; r < j; ++r) mean += 1.0 / std::sqrt(r + 1.0);
        mean /= static_cast<double>(j - i);
        for (int r = i; r < j; ++r) scaled[order[r]] = mean;
        i = j;
    }

    const double total = std::accumulate(scaled.begin(), scaled.end(), 0.0);
    const double step = total / static_cast<double>(count);
    double pointer = rng.uniform01() * step;

    std::vector<int> picks;
    picks.reserve(count);
    double cumulative = 0.0;
    int idx = 0;
    for (int s = 0; s < count; ++s) {
        const double target = pointer + step * s;
        while (idx < n - 1 && cumulative + scaled[idx] <= target)
            cumulative += scaled[idx++];
        picks.push_back(idx);
    }
    return picks;
}

/// child_i = a_i + u_i * ratio * (b_i - a_i), u_i uniform per gene,
/// clamped to the bounds.
template <typename R>
std::vector<double> intermediate_crossover(const std::vector<double>& parent_a,
                                           const std::vector<double>& parent_b,
                                           double ratio, double lower_bound,
                                           double upper_bound, R& rng) {
    std::vector<double> child(parent_a.size());
    for (std::size_t i = 0; i < parent_a.size(); ++i) {
        const double u = rng.uniform01();
        double v = parent_a[i] + u * ratio * (parent_b[i] - parent_a[i]);
        child[i] = std::clamp(v, lower_bound, upper_bound);
    }
    return child;
}

/// Gaussian step along a random direction, scaled by (1 - progress) and
/// shrunk along that direction until the result stays inside the box.
/// progress = 1 returns the input unchanged.
template <typename R>
std::vector<double> adaptive_feasible_mutation(const std::vector<double>& individual,
                                               double lower_bound,
                                               double upper_bound,
                                               double generation_progress,
                                               R& rng) {
    const double scale =
        0.1 * (upper_bound - lower_bound) * (1.0 - generation_progress);
    std::vector<double> step(individual.size());
    for (auto& s : step) s = scale * rng.gaussian();

    double shrink = 1.0;
    for (std::size_t i = 0; i < step.size(); ++i) {
        if (step[i] > 0.0)
            shrink = std::min(shrink, (upper_bound - individual[i]) / step[i]);
        else if (step[i] < 0.0)
            shrink = std::min(shrink, (lower_bound - individual[i]) / step[i]);
    }
    shrink = std::max(shrink, 0.0);

    std::vector<double> out(individual.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::clamp(individual[i] + shrink * step[i], lower_bound,
                            upper_bound);
    return out;
}

/// Algorithm: uniform initial population, per-generation fitness sweep,
/// tolerance check, rank-based stochastic uniform selection, intermediate
/// crossover at crossover_rate, adaptive feasible mutation at
/// mutation_rate, elites carried unchanged.
inline GAResult run_ga(const TimeSeries& data, int ode_order,
                       const GAConfig& cfg,
                       BasisLayout layout = BasisLayout::PaperFaithful) {
    cfg.validate();
    validate_series(data);
    if (ode_order < 1) throw InvalidConfig("ode_order must be >= 1");

    const int n_genes = ode_order + 1;
    const int n = cfg.population_size;
    const int n_elite = std::min(
        n, std::max(1, static_cast<int>(std::ceil(cfg.elite_fraction * n))));

    Rng rng(cfg.seed);
    std::vector<std::vector<double>> population(n);
    for (auto& ind : population) {
        ind.resize(n_genes);
        for (auto& g : ind) g = rng.uniform(cfg.lower_bound, cfg.upper_bound);
    }

    GAResult result;
    std::vector<double> losses(n);
    std::vector<int> order(n);

    for (int gen = 0; gen < cfg.max_generations; ++gen) {
        // slot-per-individual layout; safe to parallelize without
        // touching the driver's rng
        for (int i = 0; i < n; ++i)
            losses[i] = fitness(data, CoefficientVector{population[i]}, layout);

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return losses[a] < losses[b]; });
        if (losses[order[0]] < result.best_loss) {
            result.best_loss = losses[order[0]];
            result.best_coefficients = CoefficientVector{population[order[0]]};
        }
        result.loss_history.push_back(result.best_loss);
        result.generations_run = gen + 1;

        if (result.best_loss < cfg.function_tolerance) break;
        if (gen + 1 == cfg.max_generations) break;

        const int n_children = n - n_elite;
        const auto parents =
            stochastic_uniform_selection(losses, 2 * n_children, rng);
        const double progress =
            static_cast<double>(gen + 1) / cfg.max_generations;

        std::vector<std::vector<double>> next;
        next.reserve(n);
        for (int e = 0; e < n_elite; ++e) next.push_back(population[order[e]]);
        for (int k = 0; k < n_children; ++k) {
            const auto& pa = population[parents[2 * k]];
            const auto& pb = population[parents[2 * k + 1]];
            std::vector<double> child =
                (rng.uniform01() < cfg.crossover_rate)
                    ? intermediate_crossover(pa, pb, 1.0, cfg.lower_bound,
                                             cfg.upper_bound, rng)
                    : pa;
            if (rng.uniform01() < cfg.mutation_rate)
                child = adaptive_feasible_mutation(child, cfg.lower_bound,
                                                   cfg.upper_bound, progress,
                                                   rng);
            next.push_back(std::move(child));
        }
        population = std::move(next);
    }
    return result;
}

}  // namespace odedisc
