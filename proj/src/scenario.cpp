// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#include "hypersim/scenario.hpp"

#include "hypersim/channel.hpp"
#include "hypersim/errors.hpp"
#include "yaml_support.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace hypersim
{

std::string to_string(CaseKind kind)
{
    switch (kind)
    {
    case CaseKind::PlainBaseline:
        return "plain";
    case CaseKind::CaseA:
        return "case-a";
    case CaseKind::CaseB:
        return "case-b";
    }
    return "?";
}

const Scene &Scenario::resolved_scene() const
{
    static const Scene paper = build_paper_floorplan();
    return scene ? *scene : paper;
}

void Scenario::validate() const
{
    if (kind == CaseKind::CaseB && !threshold_dbm)
        throw Error("case-b requires a power threshold");
    ga.validate();
    radio.validate();
    if (radio.rx_positions.empty())
        throw Error("scenario needs at least one receiver");
}

Scenario paper_scenario(CaseKind kind, double frequency)
{
    Scenario s;
    s.kind = kind;
    s.radio = paper_radio(frequency);
    if (kind == CaseKind::CaseB)
        s.threshold_dbm = frequency > 10e9 ? 1.0 : 30.0;
    return s;
}

// ---------------------------------------------------------------------------
// Scenario files

namespace
{

CaseKind parse_case(const std::string &name, int line)
{
    for (CaseKind k : {CaseKind::PlainBaseline, CaseKind::CaseA, CaseKind::CaseB})
        if (to_string(k) == name)
            return k;
    throw SchemaError("unknown case '" + name + "' (expected plain, case-a or case-b)", line);
}

} // namespace

Scenario parse_scenario(const std::string &text, const std::filesystem::path &base_dir)
{
    using namespace yamlsup;
    const YAML::Node root = parse(text);
    if (!root.IsMap())
        throw SchemaError("scenario must be a mapping", line_of(root));
    if (require<int>(root, "version") != 1)
        throw SchemaError("unsupported scenario version", line_of(root["version"]));

    Scenario s;
    s.kind = parse_case(require<std::string>(root, "case"), line_of(root["case"]));
    s.seed = optional<std::uint64_t>(root, "seed", 1);
    s.workers = optional<int>(root, "workers", 0);
    if (root["threshold_dbm"])
        s.threshold_dbm = convert<double>(root["threshold_dbm"], "threshold_dbm");

    const YAML::Node scene = root["scene"];
    if (scene && scene.IsScalar())
    {
        if (scene.as<std::string>() != "paper-floorplan")
            throw SchemaError("scene must be 'paper-floorplan', {file: ...} or an inline scene", line_of(scene));
    }
    else if (scene && scene.IsMap() && scene["file"])
    {
        std::filesystem::path file = convert<std::string>(scene["file"], "file");
        if (file.is_relative())
            file = base_dir / file;
        s.scene = load_scene(file);
    }
    else if (scene && scene.IsMap())
        s.scene = scene_from_yaml(scene);
    else if (scene)
        throw SchemaError("scene must be 'paper-floorplan', {file: ...} or an inline scene", line_of(scene));

    const YAML::Node radio = root["radio"];
    if (!radio || !radio.IsMap())
        throw SchemaError("missing 'radio' section", line_of(root));
    RadioParams &r = s.radio;
    r.frequency = require<double>(radio, "frequency_hz");
    r.bandwidth = optional<double>(radio, "bandwidth_hz", r.bandwidth);
    r.tx_power_dbm = optional<double>(radio, "tx_power_dbm", r.tx_power_dbm);
    if (radio["tx"])
        r.tx_position = to_vec3(radio["tx"], "tx");
    if (radio["receivers"])
    {
        const YAML::Node rx = radio["receivers"];
        if (!rx.IsSequence())
            throw SchemaError("'receivers' must be a list of [x, y, z]", line_of(rx));
        for (const YAML::Node &p : rx)
            r.rx_positions.push_back(to_vec3(p, "receivers"));
    }
    else
        r.rx_positions = paper_receivers();
    r.max_bounces = optional<int>(radio, "max_bounces", r.max_bounces);
    r.ray_count = optional<int>(radio, "rays", r.ray_count);
    r.reception_scale = optional<double>(radio, "reception_scale", r.reception_scale);
    r.power_floor_dbm = optional<double>(radio, "power_floor_dbm", r.power_floor_dbm);
    r.concrete_loss_db = optional<double>(radio, "concrete_loss_db", r.frequency > 10e9 ? 13.0 : 7.0);
    r.absorb_loss_db = optional<double>(radio, "absorb_loss_db", r.absorb_loss_db);

    if (const YAML::Node ga = root["ga"])
    {
        if (!ga.IsMap())
            throw SchemaError("'ga' must be a mapping", line_of(ga));
        GAParams &g = s.ga;
        g.population_size = optional<int>(ga, "population", g.population_size);
        g.generations = optional<int>(ga, "generations", g.generations);
        g.crossover_rate = optional<double>(ga, "crossover_rate", g.crossover_rate);
        g.mutation_rate = optional<double>(ga, "mutation_rate", g.mutation_rate);
        g.elite_count = optional<int>(ga, "elite_count", g.elite_count);
        g.tournament_size = optional<int>(ga, "tournament_size", g.tournament_size);
        g.random_fill = optional<bool>(ga, "random_fill", g.random_fill);
    }
    s.ga.seed = s.seed;

    try
    {
        s.validate();
    }
    catch (const SchemaError &)
    {
        throw;
    }
    catch (const Error &e)
    {
        throw SchemaError(e.what(), line_of(root));
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open scenario file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.parent_path());
}

std::string dump_scenario(const Scenario &s)
{
    using yamlsup::emit_vec3;
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "version" << YAML::Value << 1;
    out << YAML::Key << "case" << YAML::Value << to_string(s.kind);
    out << YAML::Key << "seed" << YAML::Value << s.seed;
    out << YAML::Key << "workers" << YAML::Value << s.workers;
    if (s.threshold_dbm)
        out << YAML::Key << "threshold_dbm" << YAML::Value << *s.threshold_dbm;
    out << YAML::Key << "scene" << YAML::Value;
    if (s.scene)
        scene_to_yaml(out, *s.scene);
    else
        out << "paper-floorplan";

    const RadioParams &r = s.radio;
    out << YAML::Key << "radio" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "frequency_hz" << YAML::Value << r.frequency;
    out << YAML::Key << "bandwidth_hz" << YAML::Value << r.bandwidth;
    out << YAML::Key << "tx_power_dbm" << YAML::Value << r.tx_power_dbm;
    out << YAML::Key << "tx" << YAML::Value;
    emit_vec3(out, r.tx_position);
    out << YAML::Key << "receivers" << YAML::Value << YAML::BeginSeq;
    for (const Vec3 &p : r.rx_positions)
        emit_vec3(out, p);
    out << YAML::EndSeq;
    out << YAML::Key << "max_bounces" << YAML::Value << r.max_bounces;
    out << YAML::Key << "rays" << YAML::Value << r.ray_count;
    out << YAML::Key << "reception_scale" << YAML::Value << r.reception_scale;
    out << YAML::Key << "power_floor_dbm" << YAML::Value << r.power_floor_dbm;
    out << YAML::Key << "concrete_loss_db" << YAML::Value << r.concrete_loss_db;
    out << YAML::Key << "absorb_loss_db" << YAML::Value << r.absorb_loss_db;
    out << YAML::EndMap;

    const GAParams &g = s.ga;
    out << YAML::Key << "ga" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "population" << YAML::Value << g.population_size;
    out << YAML::Key << "generations" << YAML::Value << g.generations;
    out << YAML::Key << "crossover_rate" << YAML::Value << g.crossover_rate;
    out << YAML::Key << "mutation_rate" << YAML::Value << g.mutation_rate;
    out << YAML::Key << "elite_count" << YAML::Value << g.elite_count;
    out << YAML::Key << "tournament_size" << YAML::Value << g.tournament_size;
    out << YAML::Key << "random_fill" << YAML::Value << g.random_fill;
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Artifacts

namespace
{

std::string fmt(const char *spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string header(const Scenario &s, const std::string &comment = "#")
{
    const RadioParams &r = s.radio;
    const GAParams &g = s.ga;
    std::ostringstream h;
    h << comment << " hypersim " << to_string(s.kind) << " seed=" << s.seed << " frequency_hz=" << r.frequency
      << " bandwidth_hz=" << r.bandwidth << " tx_power_dbm=" << r.tx_power_dbm << " tx=(" << r.tx_position.x << ','
      << r.tx_position.y << ',' << r.tx_position.z << ") receivers=" << r.rx_positions.size() << '\n';
    h << comment << " rays=" << r.ray_count << " max_bounces=" << r.max_bounces
      << " reception_scale=" << r.reception_scale << " power_floor_dbm=" << r.power_floor_dbm
      << " concrete_loss_db=" << r.concrete_loss_db << " absorb_loss_db=" << r.absorb_loss_db << '\n';
    h << comment << " population=" << g.population_size << " generations=" << g.generations
      << " crossover_rate=" << g.crossover_rate << " mutation_rate=" << g.mutation_rate
      << " elite_count=" << g.elite_count << " tournament_size=" << g.tournament_size
      << " random_fill=" << (g.random_fill ? "true" : "false");
    if (s.threshold_dbm)
        h << " threshold_dbm=" << *s.threshold_dbm;
    h << " scene=" << (s.scene ? "inline" : "paper-floorplan") << '\n';
    return h.str();
}

struct Stats
{
    double max = 0.0, mean = 0.0, min = 0.0;
    bool any = false;
};

Stats stats(const std::vector<double> &v, const std::vector<bool> *mask = nullptr)
{
    Stats s;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (mask && !(*mask)[i])
            continue;
        if (!s.any)
            s.max = s.min = v[i];
        s.any = true;
        s.max = std::max(s.max, v[i]);
        s.min = std::min(s.min, v[i]);
        sum += v[i];
        ++n;
    }
    if (n)
        s.mean = sum / static_cast<double>(n);
    return s;
}

std::vector<double> scaled(std::vector<double> v, double k)
{
    for (double &x : v)
        x *= k;
    return v;
}

void write_file(const std::filesystem::path &path, const std::string &content)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << content;
    if (!out)
        throw IoError("failed writing " + path.string());
}

std::string grid_csv(const Scenario &s, const std::vector<double> &values, const std::vector<bool> &connected,
                     const char *spec, const std::string &what)
{
    std::vector<double> xs, ys;
    for (const Vec3 &p : s.radio.rx_positions)
    {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    auto uniq = [](std::vector<double> &v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), v.end());
    };
    uniq(xs);
    uniq(ys);
    std::map<std::pair<std::size_t, std::size_t>, std::string> cells;
    for (std::size_t k = 0; k < s.radio.rx_positions.size(); ++k)
    {
        const Vec3 &p = s.radio.rx_positions[k];
        const auto ix = static_cast<std::size_t>(
            std::find_if(xs.begin(), xs.end(), [&](double x) { return std::abs(x - p.x) < 1e-9; }) - xs.begin());
        const auto iy = static_cast<std::size_t>(
            std::find_if(ys.begin(), ys.end(), [&](double y) { return std::abs(y - p.y) < 1e-9; }) - ys.begin());
        cells[{iy, ix}] = connected[k] ? fmt(spec, values[k]) : "disconnected";
    }
    std::ostringstream out;
    out << header(s) << "# " << what << "; rows: y (m), columns: x (m)\n";
    out << "y\\x";
    for (double x : xs)
        out << ',' << fmt("%.4f", x);
    out << '\n';
    for (std::size_t iy = 0; iy < ys.size(); ++iy)
    {
        out << fmt("%.4f", ys[iy]);
        for (std::size_t ix = 0; ix < xs.size(); ++ix)
        {
            const auto it = cells.find({iy, ix});
            out << ',' << (it == cells.end() ? "" : it->second);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace

std::string format_summary(const Scenario &s, const FitnessReport &opt, const FitnessReport &plain)
{
    const Stats pa = stats(opt.powers_dbm), pb = stats(plain.powers_dbm);
    const auto da_ns = scaled(opt.delay_spreads, 1e9), db_ns = scaled(plain.delay_spreads, 1e9);
    const Stats da = stats(da_ns, &opt.connected), db = stats(db_ns, &plain.connected);

    auto cell = [](const Stats &st, double Stats::*field, const char *spec) {
        return st.any ? fmt(spec, st.*field) : std::string("n/a");
    };
    char line[160];
    std::ostringstream out;
    out << header(s);
    out << "+------+------------------------------+------------------------------+\n";
    out << "|      | Total received power (dBmW)  | Delay spread (nsec)          |\n";
    out << "|      | HSF setup    | Plain setup   | HSF setup    | Plain setup   |\n";
    out << "+------+--------------+---------------+--------------+---------------+\n";
    for (auto [name, field] : {std::pair{"Max", &Stats::max}, {"Mean", &Stats::mean}, {"Min", &Stats::min}})
    {
        std::snprintf(line, sizeof line, "| %-4s | %12s | %13s | %12s | %13s |\n", name,
                      cell(pa, field, "%.2f").c_str(), cell(pb, field, "%.2f").c_str(),
                      cell(da, field, "%.4f").c_str(), cell(db, field, "%.4f").c_str());
        out << line;
    }
    out << "+------+--------------+---------------+--------------+---------------+\n";
    out << "disconnected receivers: HSF " << opt.disconnected_count() << ", Plain " << plain.disconnected_count()
        << " (of " << opt.powers_dbm.size() << ")\n";
    out << "delay spread statistics cover connected receivers only\n";
    if (s.threshold_dbm)
    {
        auto met = [&](const FitnessReport &r) {
            return std::all_of(r.powers_dbm.begin(), r.powers_dbm.end(),
                               [&](double p) { return p >= *s.threshold_dbm; });
        };
        out << "minimum total received power constraint (>= " << fmt("%.2f", *s.threshold_dbm)
            << " dBmW at every receiver): HSF " << (met(opt) ? "met" : "NOT met") << ", Plain "
            << (met(plain) ? "met" : "NOT met") << '\n';
    }
    return out.str();
}

RunResult run(const Scenario &scenario, const std::filesystem::path &output_dir)
{
    scenario.validate();
    std::filesystem::create_directories(output_dir);
    const Scene &scene = scenario.resolved_scene();

    RadioParams radio = scenario.radio;
    GAParams ga = scenario.ga;
    ga.seed = scenario.seed;
    ga.workers = scenario.workers;
    // Parallelism lives in the GA when it runs, otherwise in the tracer.
    radio.workers = scenario.kind == CaseKind::PlainBaseline ? scenario.workers : 1;

    const EnvironmentEvaluator evaluator(scene, radio, scenario.seed);
    const double threshold = scenario.threshold_dbm.value_or(radio.power_floor_dbm);
    auto report = [&](const Genome &g) {
        return scenario.kind == CaseKind::CaseA ? evaluator.case_a(g) : evaluator.case_b(g, threshold);
    };

    RunResult result;
    const Genome plain = EnvConfiguration::plain(scene.tile_count()).to_genome();
    if (scenario.kind == CaseKind::PlainBaseline)
    {
        result.best = plain;
        result.plain = result.optimized = report(plain);
        result.history = {result.plain.score};
    }
    else
    {
        const OptimizationResult opt = scenario.kind == CaseKind::CaseA ? optimize_case_a(evaluator, ga)
                                                                        : optimize_case_b(evaluator, ga, threshold);
        result.best = opt.best;
        result.optimized = opt.best_report;
        result.plain = opt.plain_report;
        result.history = opt.ga.history;
    }
    result.summary = format_summary(scenario, result.optimized, result.plain);

    write_file(output_dir / "scenario.yaml", header(scenario) + dump_scenario(scenario));
    write_file(output_dir / "summary.txt", result.summary);

    {
        std::ostringstream csv;
        csv << header(scenario)
            << "rx,x,y,z,hsf_power_dbm,hsf_delay_spread_ns,hsf_connected,plain_power_dbm,plain_delay_spread_ns,"
               "plain_connected\n";
        for (std::size_t k = 0; k < radio.rx_positions.size(); ++k)
        {
            const Vec3 &p = radio.rx_positions[k];
            csv << k << ',' << fmt("%.4f", p.x) << ',' << fmt("%.4f", p.y) << ',' << fmt("%.4f", p.z) << ','
                << fmt("%.4f", result.optimized.powers_dbm[k]) << ','
                << fmt("%.6f", result.optimized.delay_spreads[k] * 1e9) << ',' << result.optimized.connected[k]
                << ',' << fmt("%.4f", result.plain.powers_dbm[k]) << ','
                << fmt("%.6f", result.plain.delay_spreads[k] * 1e9) << ',' << result.plain.connected[k] << '\n';
        }
        write_file(output_dir / "receivers.csv", csv.str());
    }
    write_file(output_dir / "power_grid.csv",
               grid_csv(scenario, result.optimized.powers_dbm, result.optimized.connected, "%.4f",
                        "total received power (dBmW), optimised configuration"));
    write_file(output_dir / "delay_spread_grid.csv",
               grid_csv(scenario, scaled(result.optimized.delay_spreads, 1e9), result.optimized.connected, "%.6f",
                        "RMS delay spread (ns), optimised configuration"));
    write_file(output_dir / "plain_power_grid.csv",
               grid_csv(scenario, result.plain.powers_dbm, result.plain.connected, "%.4f",
                        "total received power (dBmW), plain configuration"));
    write_file(output_dir / "plain_delay_spread_grid.csv",
               grid_csv(scenario, scaled(result.plain.delay_spreads, 1e9), result.plain.connected, "%.6f",
                        "RMS delay spread (ns), plain configuration"));

    {
        YAML::Emitter out;
        out.SetDoublePrecision(17);
        out << YAML::BeginMap;
        out << YAML::Key << "objective" << YAML::Value << result.optimized.objective;
        out << YAML::Key << "constraint_satisfied" << YAML::Value << result.optimized.constraint_satisfied;
        out << YAML::Key << "genome" << YAML::Value << YAML::Flow << result.best;
        out << YAML::Key << "tile_functions" << YAML::Value << YAML::BeginSeq;
        for (int g : result.best)
            out << TileFunction(g).name();
        out << YAML::EndSeq;
        out << YAML::Key << "history" << YAML::Value << YAML::BeginSeq;
        for (const Fitness &f : result.history)
            out << YAML::Flow << f;
        out << YAML::EndSeq << YAML::EndMap;
        write_file(output_dir / "genome.yaml", header(scenario) + out.c_str() + "\n");
    }
    {
        std::ostringstream csv;
        csv << header(scenario);
        write_paths_csv(csv, evaluator.paths(result.best));
        write_file(output_dir / "paths.csv", csv.str());
    }
    return result;
}

} // namespace hypersim
