// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Integer-genome genetic algorithm: tournament selection, uniform crossover,
// per-gene uniform-resample mutation and elitism. All randomness comes from
// one seeded stream consumed sequentially, so results do not depend on how
// many workers evaluate the population.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace hypersim
{

using Genome = std::vector<int>;

/// Compared lexicographically, higher is better. The first element is the
/// objective proper; later elements only break ties.
using Fitness = std::vector<double>;

bool fitness_less(const Fitness &a, const Fitness &b);

struct GAParams
{
    int population_size = 40;
    int generations = 100;
    double crossover_rate = 0.9;
    double mutation_rate = 0.01; // per gene
    int elite_count = 2;
    int tournament_size = 2;
    std::uint64_t seed = 1;
    int workers = 0; // 0: hardware concurrency
    // Fill the initial population with random genomes (true) or with copies
    // of the injected genomes (false).
    bool random_fill = true;

    /// Throws Error on inconsistent settings.
    void validate() const;
};

struct GAResult
{
    Genome best;
    Fitness best_fitness;
    std::vector<Fitness> history; // best of the initial population, then one per generation
    std::size_t evaluations = 0;
};

/// Must be safe to call concurrently.
using FitnessFn = std::function<Fitness(const Genome &)>;

GAResult ga_run(const FitnessFn &fitness, const GAParams &ga, int gene_arity, int genome_len,
                const std::vector<Genome> &injected = {});

} // namespace hypersim
