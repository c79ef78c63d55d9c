// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Experiment scenarios and the artifacts a run leaves in its output
// directory:
//
//   scenario.yaml          full configuration, re-readable by `hypersim run`
//   summary.txt            Max/Mean/Min table, optimised vs plain setup
//   receivers.csv          per-receiver power and delay spread
//   power_grid.csv         receiver-grid heatmaps (rows: y, columns: x)
//   delay_spread_grid.csv
//   plain_power_grid.csv, plain_delay_spread_grid.csv
//   genome.yaml            best genome and GA history
//   paths.csv              traced paths of the best configuration
//
// Every file starts with a header carrying the seed and all parameters.

#pragma once

#include "hypersim/genetic.hpp"
#include "hypersim/optimize.hpp"
#include "hypersim/raytrace.hpp"
#include "hypersim/scene.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace hypersim
{

enum class CaseKind
{
    PlainBaseline,
    CaseA,
    CaseB,
};

std::string to_string(CaseKind kind);

struct Scenario
{
    CaseKind kind = CaseKind::PlainBaseline;
    std::optional<Scene> scene; // empty: the reference floorplan
    std::optional<double> threshold_dbm;
    GAParams ga;
    RadioParams radio;
    std::uint64_t seed = 1; // drives the GA and the tracer tie-breaks
    int workers = 0;        // 0: hardware concurrency

    const Scene &resolved_scene() const;
    void validate() const;
};

/// Reference defaults for a case and band; Case B gets the band's threshold
/// (1 dBmW at 60 GHz, 30 dBmW at 2.4 GHz).
Scenario paper_scenario(CaseKind kind, double frequency);

/// Relative scene file paths resolve against base_dir.
Scenario parse_scenario(const std::string &text, const std::filesystem::path &base_dir = {});
Scenario load_scenario(const std::filesystem::path &path);
std::string dump_scenario(const Scenario &scenario);

struct RunResult
{
    FitnessReport optimized;
    FitnessReport plain;
    Genome best;
    std::vector<Fitness> history;
    std::string summary;
};

/// Runs the scenario and writes all artifacts into output_dir.
RunResult run(const Scenario &scenario, const std::filesystem::path &output_dir);

/// Max/Mean/Min table comparing the optimised and plain setups.
std::string format_summary(const Scenario &scenario, const FitnessReport &optimized, const FitnessReport &plain);

} // namespace hypersim
