// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Command-line experiment runner.
//
//   hypersim plain  [options]        plain (all-specular) baseline
//   hypersim case-a [options]        maximise the weakest receiver
//   hypersim case-b [options]        minimise delay spread under a power floor
//   hypersim run <scenario.yaml>     replay a scenario file
//   hypersim lookup [options]        build a switch-configuration lookup table
//   hypersim network [options]       broadcast a configuration over the tile network
//
// Exit status: 0 success, 3 schema error, 4 invalid argument or constraint,
// 5 I/O error, 6 delivery failure, 1 anything else.

#include "hypersim/controlnet.hpp"
#include "hypersim/emfunc.hpp"
#include "hypersim/errors.hpp"
#include "hypersim/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace hypersim;

namespace
{

constexpr int kExitOther = 1;

struct CaseOptions
{
    std::uint64_t seed = 1;
    std::optional<int> rays, bounces, pop, gens;
    std::string freq = "60GHz";
    std::optional<double> threshold_dbm;
    std::string out = "out";
    std::string scene;
    int workers = 0;
};

double parse_band(const std::string &band)
{
    if (band == "60GHz")
        return 60e9;
    if (band == "2.4GHz")
        return 2.4e9;
    throw Error("--freq must be 2.4GHz or 60GHz");
}

void add_case_options(CLI::App *cmd, CaseOptions &o, bool threshold)
{
    cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
    cmd->add_option("--rays", o.rays, "launched rays");
    cmd->add_option("--bounces", o.bounces, "maximum bounces per ray");
    cmd->add_option("--pop", o.pop, "GA population size");
    cmd->add_option("--gens", o.gens, "GA generations");
    cmd->add_option("--freq", o.freq, "carrier band")
        ->check(CLI::IsMember({"2.4GHz", "60GHz"}))
        ->capture_default_str();
    if (threshold)
        cmd->add_option("--threshold-dbm", o.threshold_dbm, "minimum total received power per receiver");
    cmd->add_option("--out", o.out, "output directory")->capture_default_str();
    cmd->add_option("--scene", o.scene, "scene file (default: reference floorplan)");
    cmd->add_option("--workers", o.workers, "worker threads (0: all cores)")->capture_default_str();
}

Scenario scenario_from(CaseKind kind, const CaseOptions &o)
{
    Scenario s = paper_scenario(kind, parse_band(o.freq));
    s.seed = o.seed;
    s.ga.seed = o.seed;
    s.workers = o.workers;
    if (o.rays)
        s.radio.ray_count = *o.rays;
    if (o.bounces)
        s.radio.max_bounces = *o.bounces;
    if (o.pop)
        s.ga.population_size = *o.pop;
    if (o.gens)
        s.ga.generations = *o.gens;
    if (o.threshold_dbm)
        s.threshold_dbm = o.threshold_dbm;
    if (!o.scene.empty())
        s.scene = load_scene(o.scene);
    return s;
}

int run_scenario(const Scenario &s, const fs::path &out)
{
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out))
        throw IoError("cannot create output directory " + out.string());
    const RunResult r = run(s, out);
    std::cout << r.summary;
    std::cout << "artifacts written to " << out.string() << '\n';
    return 0;
}

void write_text(const fs::path &path, const std::string &text)
{
    std::error_code ec;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out || !(out << text))
        throw IoError("cannot write " + path.string());
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"hypersim - programmable indoor wireless environment simulator"};
    app.require_subcommand(1);

    CaseOptions plain_opts, a_opts, b_opts;
    CLI::App *plain = app.add_subcommand("plain", "evaluate the plain (all-specular) environment");
    add_case_options(plain, plain_opts, false);
    CLI::App *case_a = app.add_subcommand("case-a", "maximise the minimum received power");
    add_case_options(case_a, a_opts, false);
    CLI::App *case_b = app.add_subcommand("case-b", "minimise delay spread subject to a power threshold");
    add_case_options(case_b, b_opts, true);

    std::string scenario_file, run_out;
    CLI::App *replay = app.add_subcommand("run", "run a scenario file");
    replay->add_option("scenario", scenario_file, "scenario file")->required();
    replay->add_option("--out", run_out, "output directory (default: next to the scenario file)");

    int lookup_m = 2;
    std::string lookup_search = "exhaustive", lookup_freq = "60GHz", lookup_out = "lookup.yaml";
    std::uint64_t lookup_seed = 1;
    CLI::App *lookup = app.add_subcommand("lookup", "build the switch-configuration lookup table");
    lookup->add_option("--m", lookup_m, "switch elements per side")->capture_default_str();
    lookup->add_option("--search", lookup_search, "search method")
        ->check(CLI::IsMember({"exhaustive", "genetic"}))
        ->capture_default_str();
    lookup->add_option("--freq", lookup_freq, "carrier band")
        ->check(CLI::IsMember({"2.4GHz", "60GHz"}))
        ->capture_default_str();
    lookup->add_option("--seed", lookup_seed, "random seed")->capture_default_str();
    lookup->add_option("--out", lookup_out, "output file")->capture_default_str();

    double net_failures = 0.0;
    std::uint64_t net_seed = 1;
    std::string net_out = "network";
    CLI::App *network = app.add_subcommand("network", "broadcast the plain configuration over the tile network");
    network->add_option("--failures", net_failures, "fraction of tiles with a failed gateway controller")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    network->add_option("--seed", net_seed, "random seed")->capture_default_str();
    network->add_option("--out", net_out, "output directory")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorCategory::InvalidArgument);
    }

    try
    {
        if (*plain)
            return run_scenario(scenario_from(CaseKind::PlainBaseline, plain_opts), plain_opts.out);
        if (*case_a)
            return run_scenario(scenario_from(CaseKind::CaseA, a_opts), a_opts.out);
        if (*case_b)
            return run_scenario(scenario_from(CaseKind::CaseB, b_opts), b_opts.out);
        if (*replay)
        {
            const Scenario s = load_scenario(scenario_file);
            const fs::path out = run_out.empty() ? fs::path(scenario_file).parent_path() / "replay" : fs::path(run_out);
            return run_scenario(s, out);
        }
        if (*lookup)
        {
            LookupOptions options;
            options.seed = lookup_seed;
            const double lambda = kSpeedOfLight / parse_band(lookup_freq);
            const LookupTable table =
                populate_lookup(tile_catalog(lambda), lookup_m,
                                lookup_search == "genetic" ? SearchMethod::Genetic : SearchMethod::Exhaustive, options);
            write_text(lookup_out, dump_lookup(table));
            std::cout << table.size() << " entries written to " << lookup_out << '\n';
            return 0;
        }
        if (*network)
        {
            const Scene scene = build_paper_floorplan();
            Network net = Network::from_scene(scene);
            const std::vector<TileId> failed = net.inject_failures(net_failures, net_seed);
            const BroadcastReport rep = net.broadcast_config(EnvConfiguration::plain(scene.tile_count()));
            std::ofstream log_file;
            const fs::path dir(net_out);
            std::error_code ec;
            fs::create_directories(dir, ec);
            log_file.open(dir / "network_log.txt");
            if (!log_file)
                throw IoError("cannot write " + (dir / "network_log.txt").string());
            log_file << "# hypersim network seed=" << net_seed << " failures=" << net_failures
                     << " tiles=" << net.size() << '\n';
            net.write_log(log_file);
            std::cout << "tiles " << net.size() << ", failed " << failed.size() << ", delivered " << rep.delivered
                      << ", acked " << rep.acked << ", errors " << rep.failed << ", unreachable "
                      << rep.unreachable.size() << ", hop volume " << rep.hop_volume << ", completion tick "
                      << rep.completion_tick << '\n';
            return 0;
        }
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.category());
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
    return kExitOther;
}
