// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Environment optimisation. Case A maximises the minimum received power
// over the receivers; Case B minimises the maximum RMS delay spread subject
// to a per-receiver power threshold. Both search tile configurations with
// the genetic algorithm, seeded with the plain (all specular) configuration.
//
// Also: the multi-user transmit power / tile allocation program
//   max sum_j d_j P_r(j)  s.t.  sum_j P_t(j) <= P_total, sum_j M(j) <= M_total.

#pragma once

#include "hypersim/channel.hpp"
#include "hypersim/genetic.hpp"
#include "hypersim/raytrace.hpp"

#include <functional>
#include <vector>

namespace hypersim
{

struct FitnessReport
{
    double objective = 0.0;             // Case A: min power (dBmW); Case B: max delay spread (s)
    std::vector<double> powers_dbm;     // per receiver, floor when disconnected
    std::vector<double> delay_spreads;  // per receiver, s; 0 when disconnected
    std::vector<bool> connected;
    bool constraint_satisfied = true;   // Case B power threshold at every receiver
    double violation_db = 0.0;          // sum of per-receiver threshold shortfalls
    Fitness score;                      // GA ranking key, higher is better

    std::size_t disconnected_count() const;
};

/// Case A ranking is leximin over the receiver powers: the minimum first,
/// then the next-weakest receiver, and so on.
FitnessReport score_case_a(const PathSet &paths, const RadioParams &params);

/// Case B ranking: (-violation, -max spread, -mean spread), so every feasible
/// configuration outranks every infeasible one and infeasible ones are
/// ordered by how far they miss the threshold.
FitnessReport score_case_b(const PathSet &paths, const RadioParams &params, double power_threshold_dbm);

/// Traces genomes against a fixed scene and radio setup.
class EnvironmentEvaluator
{
  public:
    EnvironmentEvaluator(const Scene &scene, const RadioParams &params, std::uint64_t seed = 0);

    const Scene &scene() const { return tracer_.scene(); }
    const RadioParams &params() const { return tracer_.params(); }

    PathSet paths(const Genome &genome) const;
    FitnessReport case_a(const Genome &genome) const;
    FitnessReport case_b(const Genome &genome, double power_threshold_dbm) const;

  private:
    RayTracer tracer_;
    std::uint64_t seed_;
};

FitnessReport fitness_case_a(const Scene &scene, const Genome &genome, const RadioParams &params);
FitnessReport fitness_case_b(const Scene &scene, const Genome &genome, const RadioParams &params,
                             double power_threshold_dbm);

struct OptimizationResult
{
    GAResult ga;
    Genome best;
    FitnessReport best_report;
    FitnessReport plain_report;
};

OptimizationResult optimize_case_a(const EnvironmentEvaluator &evaluator, const GAParams &ga);
OptimizationResult optimize_case_b(const EnvironmentEvaluator &evaluator, const GAParams &ga,
                                   double power_threshold_dbm);

// ---------------------------------------------------------------------------
// Multi-user allocation

struct MultiUserProblem
{
    Vec3 tx_position;
    std::vector<Vec3> rx_positions;
    std::vector<double> weights; // d_j; empty means the Tx-Rx distances
    double total_power_mw = 0.0;
    int total_tiles = 0;
    int power_levels = 32; // power is split in multiples of total_power_mw / power_levels

    std::vector<double> resolved_weights() const;
};

struct Allocation
{
    std::vector<double> power_mw;
    std::vector<int> tiles;
    double objective = 0.0; // sum_j d_j P_r(j)
};

/// Received power of user j given its transmit power (mW) and tile count.
using UserGain = std::function<double(std::size_t user, double power_mw, int tiles)>;

/// Exact over the discretised power grid and integer tile splits (dynamic
/// programming over users). Ties prefer giving earlier users more resources.
Allocation allocate_multiuser(const MultiUserProblem &problem, const UserGain &gain);

/// Link-budget gain: free-space direct path plus one reflected contribution
/// per allocated tile, each `tile_gain_db` below the direct path. Coherent
/// mode aligns the phases of all contributions before summing amplitudes.
UserGain link_budget_gain(const MultiUserProblem &problem, double frequency, double tile_gain_db, bool coherent);

} // namespace hypersim
