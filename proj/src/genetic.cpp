// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#include "hypersim/genetic.hpp"

#include "hypersim/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>

namespace hypersim
{

bool fitness_less(const Fitness &a, const Fitness &b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void GAParams::validate() const
{
    if (population_size < 2)
        throw Error("GA population_size must be at least 2");
    if (generations < 0)
        throw Error("GA generations must be non-negative");
    if (elite_count < 0 || elite_count >= population_size)
        throw Error("GA elite_count must satisfy 0 <= elite_count < population_size");
    if (crossover_rate < 0.0 || crossover_rate > 1.0 || mutation_rate < 0.0 || mutation_rate > 1.0)
        throw Error("GA rates must lie in [0, 1]");
    if (tournament_size < 1)
        throw Error("GA tournament_size must be at least 1");
}

namespace
{

struct Individual
{
    Genome genes;
    std::optional<Fitness> fitness;
};

class Evolution
{
  public:
    Evolution(const FitnessFn &fn, const GAParams &ga, int arity, int len)
        : fn_(fn), ga_(ga), arity_(arity), len_(len), rng_(ga.seed)
    {
    }

    Genome random_genome()
    {
        std::uniform_int_distribution<int> gene(0, arity_ - 1);
        Genome g(static_cast<std::size_t>(len_));
        for (int &v : g)
            v = gene(rng_);
        return g;
    }

    void evaluate(std::vector<Individual> &pop, std::size_t &evaluations)
    {
        std::vector<std::size_t> pending;
        for (std::size_t i = 0; i < pop.size(); ++i)
            if (!pop[i].fitness)
                pending.push_back(i);
        detail::parallel_for(pending.size(), ga_.workers,
                             [&](std::size_t k) { pop[pending[k]].fitness = fn_(pop[pending[k]].genes); });
        evaluations += pending.size();
    }

    /// Indices sorted best first; equal fitness keeps population order.
    static std::vector<std::size_t> ranking(const std::vector<Individual> &pop)
    {
        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return fitness_less(*pop[b].fitness, *pop[a].fitness);
        });
        return order;
    }

    std::size_t tournament(const std::vector<Individual> &pop)
    {
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        std::size_t winner = pick(rng_);
        for (int k = 1; k < ga_.tournament_size; ++k)
        {
            const std::size_t challenger = pick(rng_);
            const Fitness &fw = *pop[winner].fitness, &fc = *pop[challenger].fitness;
            if (fitness_less(fw, fc) || (!fitness_less(fc, fw) && challenger < winner))
                winner = challenger;
        }
        return winner;
    }

    Genome offspring(const Genome &a, const Genome &b)
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_int_distribution<int> gene(0, arity_ - 1);
        Genome child = a;
        if (unit(rng_) < ga_.crossover_rate)
            for (std::size_t i = 0; i < child.size(); ++i)
                if (unit(rng_) < 0.5)
                    child[i] = b[i];
        for (int &v : child)
            if (unit(rng_) < ga_.mutation_rate)
                v = gene(rng_);
        return child;
    }

  private:
    const FitnessFn &fn_;
    const GAParams &ga_;
    int arity_;
    int len_;
    std::mt19937_64 rng_;
};

} // namespace

GAResult ga_run(const FitnessFn &fitness, const GAParams &ga, int gene_arity, int genome_len,
                const std::vector<Genome> &injected)
{
    ga.validate();
    if (gene_arity < 1 || genome_len < 1)
        throw Error("GA needs gene_arity >= 1 and genome_len >= 1");
    for (const Genome &g : injected)
    {
        if (g.size() != static_cast<std::size_t>(genome_len))
            throw Error("injected genome has the wrong length");
        if (std::any_of(g.begin(), g.end(), [&](int v) { return v < 0 || v >= gene_arity; }))
            throw Error("injected genome has a gene outside the arity");
    }
    if (!ga.random_fill && injected.empty())
        throw Error("GA random_fill=false requires at least one injected genome");

    Evolution evo(fitness, ga, gene_arity, genome_len);
    const auto pop_size = static_cast<std::size_t>(ga.population_size);

    std::vector<Individual> pop;
    pop.reserve(pop_size);
    for (std::size_t i = 0; i < injected.size() && pop.size() < pop_size; ++i)
        pop.push_back({injected[i], std::nullopt});
    for (std::size_t k = 0; pop.size() < pop_size; ++k)
        pop.push_back({ga.random_fill ? evo.random_genome() : injected[k % injected.size()], std::nullopt});

    GAResult result;
    evo.evaluate(pop, result.evaluations);
    auto order = Evolution::ranking(pop);
    result.best = pop[order[0]].genes;
    result.best_fitness = *pop[order[0]].fitness;
    result.history.push_back(result.best_fitness);

    for (int gen = 0; gen < ga.generations; ++gen)
    {
        std::vector<Individual> next;
        next.reserve(pop_size);
        for (int e = 0; e < ga.elite_count; ++e)
            next.push_back(pop[order[static_cast<std::size_t>(e)]]);
        while (next.size() < pop_size)
        {
            const std::size_t a = evo.tournament(pop);
            const std::size_t b = evo.tournament(pop);
            next.push_back({evo.offspring(pop[a].genes, pop[b].genes), std::nullopt});
        }
        pop = std::move(next);
        evo.evaluate(pop, result.evaluations);
        order = Evolution::ranking(pop);

        const Individual &leader = pop[order[0]];
        result.history.push_back(*leader.fitness);
        if (fitness_less(result.best_fitness, *leader.fitness))
        {
            result.best = leader.genes;
            result.best_fitness = *leader.fitness;
        }
    }
    return result;
}

} // namespace hypersim
