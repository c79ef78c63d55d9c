// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#include "hypersim/optimize.hpp"

#include "hypersim/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace hypersim
{

std::size_t FitnessReport::disconnected_count() const
{
    return static_cast<std::size_t>(std::count(connected.begin(), connected.end(), false));
}

namespace
{

FitnessReport receiver_metrics(const PathSet &paths, const RadioParams &params)
{
    FitnessReport r;
    for (const auto &rx_paths : paths)
    {
        const ReceivedPower p = total_power_dbm(rx_paths, params.power_floor_dbm);
        r.powers_dbm.push_back(p.dbm);
        r.connected.push_back(!p.disconnected);
        const PowerDelayProfile pdp = PowerDelayProfile::from_paths(rx_paths);
        r.delay_spreads.push_back(pdp.empty() ? 0.0 : delay_spread(pdp));
    }
    return r;
}

} // namespace

FitnessReport score_case_a(const PathSet &paths, const RadioParams &params)
{
    FitnessReport r = receiver_metrics(paths, params);
    r.score = r.powers_dbm;
    std::sort(r.score.begin(), r.score.end());
    r.objective = r.score.empty() ? params.power_floor_dbm : r.score.front();
    return r;
}

FitnessReport score_case_b(const PathSet &paths, const RadioParams &params, double power_threshold_dbm)
{
    FitnessReport r = receiver_metrics(paths, params);
    double max_ds = 0.0, sum_ds = 0.0;
    std::size_t live = 0;
    for (std::size_t j = 0; j < r.powers_dbm.size(); ++j)
    {
        r.violation_db += std::max(0.0, power_threshold_dbm - r.powers_dbm[j]);
        if (r.connected[j])
        {
            max_ds = std::max(max_ds, r.delay_spreads[j]);
            sum_ds += r.delay_spreads[j];
            ++live;
        }
    }
    r.constraint_satisfied = r.violation_db == 0.0;
    r.objective = max_ds;
    const double mean_ds = live ? sum_ds / static_cast<double>(live) : 0.0;
    r.score = {-r.violation_db, -max_ds, -mean_ds};
    return r;
}

EnvironmentEvaluator::EnvironmentEvaluator(const Scene &scene, const RadioParams &params, std::uint64_t seed)
    : tracer_(scene, params), seed_(seed)
{
}

PathSet EnvironmentEvaluator::paths(const Genome &genome) const
{
    if (genome.size() != scene().tile_count())
        throw Error("genome length " + std::to_string(genome.size()) + " does not match " +
                    std::to_string(scene().tile_count()) + " tiles");
    return tracer_.trace(EnvConfiguration::from_genome(genome), seed_);
}

FitnessReport EnvironmentEvaluator::case_a(const Genome &genome) const
{
    return score_case_a(paths(genome), params());
}

FitnessReport EnvironmentEvaluator::case_b(const Genome &genome, double power_threshold_dbm) const
{
    return score_case_b(paths(genome), params(), power_threshold_dbm);
}

FitnessReport fitness_case_a(const Scene &scene, const Genome &genome, const RadioParams &params)
{
    return EnvironmentEvaluator(scene, params).case_a(genome);
}

FitnessReport fitness_case_b(const Scene &scene, const Genome &genome, const RadioParams &params,
                             double power_threshold_dbm)
{
    return EnvironmentEvaluator(scene, params).case_b(genome, power_threshold_dbm);
}

namespace
{

OptimizationResult optimize(const EnvironmentEvaluator &evaluator, const GAParams &ga,
                            const std::function<FitnessReport(const Genome &)> &report)
{
    const Genome plain = EnvConfiguration::plain(evaluator.scene().tile_count()).to_genome();
    OptimizationResult out;
    out.ga = ga_run([&](const Genome &g) { return report(g).score; }, ga, TileFunction::kCount,
                    static_cast<int>(plain.size()), {plain});
    out.best = out.ga.best;
    out.best_report = report(out.best);
    out.plain_report = report(plain);
    return out;
}

} // namespace

OptimizationResult optimize_case_a(const EnvironmentEvaluator &evaluator, const GAParams &ga)
{
    return optimize(evaluator, ga, [&](const Genome &g) { return evaluator.case_a(g); });
}

OptimizationResult optimize_case_b(const EnvironmentEvaluator &evaluator, const GAParams &ga,
                                   double power_threshold_dbm)
{
    return optimize(evaluator, ga, [&](const Genome &g) { return evaluator.case_b(g, power_threshold_dbm); });
}

// ---------------------------------------------------------------------------
// Multi-user allocation

std::vector<double> MultiUserProblem::resolved_weights() const
{
    if (!weights.empty())
    {
        if (weights.size() != rx_positions.size())
            throw Error("multi-user problem needs one weight per user");
        return weights;
    }
    std::vector<double> w;
    for (const Vec3 &rx : rx_positions)
        w.push_back(distance(rx, tx_position));
    return w;
}

Allocation allocate_multiuser(const MultiUserProblem &problem, const UserGain &gain)
{
    const std::size_t users = problem.rx_positions.size();
    if (users == 0)
        throw EmptyProblemError("multi-user allocation needs at least one user");
    if (problem.power_levels < 1 || problem.total_tiles < 0 || problem.total_power_mw < 0.0)
        throw Error("multi-user allocation needs power_levels >= 1 and non-negative totals");

    const std::vector<double> w = problem.resolved_weights();
    const int levels = problem.power_levels;
    const int tiles = problem.total_tiles;
    const double quantum = problem.total_power_mw / levels;
    const auto nq = static_cast<std::size_t>(levels + 1), nm = static_cast<std::size_t>(tiles + 1);
    auto cell = [nm](std::size_t q, std::size_t m) { return q * nm + m; };
    constexpr double kUnreached = -std::numeric_limits<double>::infinity();

    // best[j][q, m]: best weighted sum over users < j using exactly q power
    // quanta and m tiles; choice[j] records user j-1's share.
    std::vector<std::vector<double>> best(users + 1, std::vector<double>(nq * nm, kUnreached));
    std::vector<std::vector<std::pair<int, int>>> choice(users + 1, std::vector<std::pair<int, int>>(nq * nm));
    best[0][cell(0, 0)] = 0.0;

    for (std::size_t j = 0; j < users; ++j)
    {
        std::vector<double> share(nq * nm);
        for (std::size_t a = 0; a < nq; ++a)
            for (std::size_t b = 0; b < nm; ++b)
                share[cell(a, b)] = w[j] * gain(j, static_cast<double>(a) * quantum, static_cast<int>(b));

        for (std::size_t q = 0; q < nq; ++q)
            for (std::size_t m = 0; m < nm; ++m)
            {
                double &dst = best[j + 1][cell(q, m)];
                for (std::size_t a = q + 1; a-- > 0;)
                    for (std::size_t b = m + 1; b-- > 0;)
                    {
                        const double prev = best[j][cell(q - a, m - b)];
                        if (prev == kUnreached)
                            continue;
                        const double v = prev + share[cell(a, b)];
                        if (v > dst)
                        {
                            dst = v;
                            choice[j + 1][cell(q, m)] = {static_cast<int>(a), static_cast<int>(b)};
                        }
                    }
            }
    }

    std::size_t bq = 0, bm = 0;
    double top = kUnreached;
    for (std::size_t q = nq; q-- > 0;)
        for (std::size_t m = nm; m-- > 0;)
            if (best[users][cell(q, m)] > top)
            {
                top = best[users][cell(q, m)];
                bq = q;
                bm = m;
            }

    Allocation alloc;
    alloc.power_mw.assign(users, 0.0);
    alloc.tiles.assign(users, 0);
    alloc.objective = top;
    for (std::size_t j = users; j > 0; --j)
    {
        const auto [a, b] = choice[j][cell(bq, bm)];
        alloc.power_mw[j - 1] = a * quantum;
        alloc.tiles[j - 1] = b;
        bq -= static_cast<std::size_t>(a);
        bm -= static_cast<std::size_t>(b);
    }

    assert(std::accumulate(alloc.tiles.begin(), alloc.tiles.end(), 0) <= tiles);
    assert(std::accumulate(alloc.power_mw.begin(), alloc.power_mw.end(), 0.0) <=
           problem.total_power_mw * (1.0 + 1e-12));
    return alloc;
}

UserGain link_budget_gain(const MultiUserProblem &problem, double frequency, double tile_gain_db, bool coherent)
{
    std::vector<double> direct;
    const double lambda = kSpeedOfLight / frequency;
    for (const Vec3 &rx : problem.rx_positions)
    {
        const double d = std::max(distance(rx, problem.tx_position), 1e-3);
        const double fs = lambda / (4.0 * kPi * d);
        direct.push_back(fs * fs);
    }
    const double per_tile = std::pow(10.0, -tile_gain_db / 10.0);
    return [direct, per_tile, coherent, frequency](std::size_t user, double power_mw, int tiles) {
        const double g0 = direct.at(user), gt = g0 * per_tile;
        if (!coherent)
            return power_mw * (g0 + tiles * gt);
        // Harmonised phases: every contribution arrives in phase.
        std::vector<PropagationPath> paths(static_cast<std::size_t>(tiles) + 1);
        paths[0].attenuation = std::sqrt(g0);
        for (std::size_t i = 1; i < paths.size(); ++i)
            paths[i].attenuation = std::sqrt(gt);
        return power_mw * std::norm(received_signal(paths, frequency).amplitude);
    };
}

} // namespace hypersim
