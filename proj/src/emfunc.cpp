// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#include "hypersim/emfunc.hpp"

#include "hypersim/errors.hpp"
#include "hypersim/genetic.hpp"
#include "hypersim/raytrace.hpp"
#include "yaml_support.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

namespace hypersim
{

void EMFunction::validate() const
{
    if (kind == FunctionKind::Steer && !out_dir)
        throw ParameterError("STEER requires an intended reflection direction");
    if (kind == FunctionKind::Absorb && out_dir)
        throw ParameterError("ABSORB takes no reflection direction");
    if (std::abs(incident_doa.norm() - 1.0) > 1e-9)
        throw ParameterError("incident DoA must be a unit vector");
    if (out_dir && std::abs(out_dir->norm() - 1.0) > 1e-9)
        throw ParameterError("reflection direction must be a unit vector");
}

// ---------------------------------------------------------------------------
// TileFunction

TileFunction::TileFunction(int index) : index_(index)
{
    if (index < 0 || index >= kCount)
        throw Error("tile function index " + std::to_string(index) + " outside 0.." + std::to_string(kCount - 1));
}

TileFunction TileFunction::steer(double azimuth_deg, double elevation_deg)
{
    auto slot = [](double a) {
        for (int i = 0; i < 5; ++i)
            if (std::abs(kCatalogAngles[i] - a) < 1e-9)
                return i;
        throw InvalidAngleError("steering angle " + std::to_string(a) + " deg is not in the tile catalog");
    };
    return TileFunction(slot(azimuth_deg) * 5 + slot(elevation_deg));
}

double TileFunction::azimuth_deg() const
{
    return is_absorb() ? 0.0 : kCatalogAngles[index_ / 5];
}

double TileFunction::elevation_deg() const
{
    return is_absorb() ? 0.0 : kCatalogAngles[index_ % 5];
}

std::string TileFunction::name() const
{
    if (is_absorb())
        return "Absorb";
    char buf[48];
    std::snprintf(buf, sizeof buf, "Steer{%g,%g}", azimuth_deg(), elevation_deg());
    return buf;
}

Vec3 function_normal(const Tile &tile, TileFunction f)
{
    if (f.is_absorb())
        return tile.true_normal;
    return virtual_normal(tile, f.azimuth_deg(), f.elevation_deg());
}

// ---------------------------------------------------------------------------
// SwitchMatrix

SwitchMatrix::SwitchMatrix(int m) : m_(m), bits_(static_cast<std::size_t>(m * m), 0)
{
    if (m < 1)
        throw Error("switch matrix size must be at least 1");
}

SwitchMatrix SwitchMatrix::from_index(int m, std::uint64_t index)
{
    SwitchMatrix s(m);
    const int n = s.cell_count();
    for (int c = 0; c < n; ++c)
        s.bits_[static_cast<std::size_t>(c)] = (index >> (n - 1 - c)) & 1U;
    return s;
}

SwitchMatrix SwitchMatrix::from_bits(int m, const std::string &bits)
{
    SwitchMatrix s(m);
    if (bits.size() != static_cast<std::size_t>(s.cell_count()))
        throw Error("switch bit string has length " + std::to_string(bits.size()) + ", expected " +
                    std::to_string(s.cell_count()));
    for (std::size_t c = 0; c < bits.size(); ++c)
    {
        if (bits[c] != '0' && bits[c] != '1')
            throw Error("switch bit string must contain only 0 and 1");
        s.bits_[c] = bits[c] == '1';
    }
    return s;
}

std::uint64_t SwitchMatrix::index() const
{
    std::uint64_t v = 0;
    for (std::uint8_t b : bits_)
        v = (v << 1) | b;
    return v;
}

SwitchMatrix SwitchMatrix::complement() const
{
    SwitchMatrix s = *this;
    for (auto &b : s.bits_)
        b ^= 1U;
    return s;
}

std::string SwitchMatrix::to_string() const
{
    std::string s;
    for (std::uint8_t b : bits_)
        s.push_back(b ? '1' : '0');
    return s;
}

// ---------------------------------------------------------------------------
// Array-factor pattern

double ReflectionPattern::max() const
{
    return power.empty() ? 0.0 : *std::max_element(power.begin(), power.end());
}

Vec3 pattern_direction(double azimuth_deg, double elevation_deg)
{
    const double az = deg2rad(azimuth_deg), el = deg2rad(elevation_deg);
    return {std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az)};
}

namespace
{

using cd = std::complex<double>;

std::vector<double> grid_axis(double step)
{
    if (!(step > 0.0) || step >= 90.0)
        throw Error("pattern grid step must lie in (0, 90) degrees");
    std::vector<double> axis;
    const int k = static_cast<int>(std::ceil(90.0 / step - 1e-9)) - 1;
    for (int i = -k; i <= k; ++i)
        axis.push_back(i * step);
    return axis;
}

// Per-cell phasor toward every grid direction, for a fixed incidence.
class CellField
{
  public:
    CellField(int m, const Vec3 &incident, double wavelength, double pitch, const std::vector<Vec3> &dirs)
        : cells_(m * m), points_(dirs.size()), field_(static_cast<std::size_t>(cells_) * dirs.size())
    {
        const double k = 2.0 * kPi / wavelength;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
            {
                const Vec3 r{j * pitch, i * pitch, 0.0};
                const std::size_t c = static_cast<std::size_t>(i * m + j);
                for (std::size_t p = 0; p < dirs.size(); ++p)
                    field_[c * points_ + p] = std::polar(1.0, -k * dot(r, incident - dirs[p]));
            }
        norm_ = 1.0 / (static_cast<double>(cells_) * cells_);
    }

    /// Power of sigma toward grid point p.
    void powers(const SwitchMatrix &sigma, std::vector<cd> &scratch, std::vector<double> &out) const
    {
        scratch.assign(points_, cd{0.0, 0.0});
        for (int c = 0; c < cells_; ++c)
        {
            const cd *f = &field_[static_cast<std::size_t>(c) * points_];
            if (sigma.bits()[static_cast<std::size_t>(c)])
                for (std::size_t p = 0; p < points_; ++p)
                    scratch[p] -= f[p];
            else
                for (std::size_t p = 0; p < points_; ++p)
                    scratch[p] += f[p];
        }
        out.resize(points_);
        for (std::size_t p = 0; p < points_; ++p)
            out[p] = std::norm(scratch[p]) * norm_;
    }

    double max_power(const SwitchMatrix &sigma, std::vector<cd> &scratch, std::vector<double> &buf) const
    {
        powers(sigma, scratch, buf);
        return *std::max_element(buf.begin(), buf.end());
    }

  private:
    int cells_;
    std::size_t points_;
    std::vector<cd> field_;
    double norm_ = 1.0;
};

std::vector<Vec3> grid_directions(const std::vector<double> &az, const std::vector<double> &el)
{
    std::vector<Vec3> dirs;
    dirs.reserve(az.size() * el.size());
    for (double e : el)
        for (double a : az)
            dirs.push_back(pattern_direction(a, e));
    return dirs;
}

} // namespace

ReflectionPattern array_pattern(const SwitchMatrix &sigma, const Vec3 &incident, double wavelength,
                                double cell_pitch, double grid_step_deg)
{
    ReflectionPattern pat;
    pat.azimuth_deg = grid_axis(grid_step_deg);
    pat.elevation_deg = pat.azimuth_deg;
    const CellField field(sigma.size(), incident, wavelength, cell_pitch,
                          grid_directions(pat.azimuth_deg, pat.elevation_deg));
    std::vector<cd> scratch;
    field.powers(sigma, scratch, pat.power);
    return pat;
}

double pattern_power(const SwitchMatrix &sigma, const Vec3 &incident, const Vec3 &direction, double wavelength,
                     double cell_pitch)
{
    const CellField field(sigma.size(), incident, wavelength, cell_pitch, {direction});
    std::vector<cd> scratch;
    std::vector<double> out;
    field.powers(sigma, scratch, out);
    return out[0];
}

// ---------------------------------------------------------------------------
// Lookup table

void LookupTable::insert(LookupEntry entry)
{
    std::string key = entry.key;
    entries_.insert_or_assign(std::move(key), std::move(entry));
}

const LookupEntry &LookupTable::at(const std::string &key) const
{
    const LookupEntry *e = find(key);
    if (!e)
        throw Error("no lookup entry for " + key);
    return *e;
}

const LookupEntry *LookupTable::find(const std::string &key) const
{
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

std::string function_key(const EMFunction &f)
{
    auto fmt = [](const Vec3 &v) {
        char buf[96];
        auto q = [](double x) { return std::abs(x) < 5e-7 ? 0.0 : x; };
        std::snprintf(buf, sizeof buf, "(%.6f,%.6f,%.6f)", q(v.x), q(v.y), q(v.z));
        return std::string(buf);
    };
    std::string key = f.kind == FunctionKind::Absorb ? "ABSORB" : "STEER";
    key += " I=" + fmt(f.incident_doa);
    if (f.out_dir)
        key += " O=" + fmt(*f.out_dir);
    char lam[32];
    std::snprintf(lam, sizeof lam, " L=%.9g", f.wavelength);
    return key + lam;
}

namespace
{

// Higher is better for both kinds; ABSORB negates the pattern maximum.
class EntryObjective
{
  public:
    EntryObjective(const EMFunction &f, int m, const LookupOptions &opt)
        : absorb_(f.kind == FunctionKind::Absorb)
    {
        const double pitch = opt.cell_pitch_fraction * f.wavelength;
        if (absorb_)
        {
            const auto axis = grid_axis(opt.grid_step_deg);
            field_.emplace(m, f.incident_doa, f.wavelength, pitch, grid_directions(axis, axis));
        }
        else
            field_.emplace(m, f.incident_doa, f.wavelength, pitch, std::vector<Vec3>{*f.out_dir});
    }

    double operator()(const SwitchMatrix &sigma) const
    {
        std::vector<cd> scratch;
        std::vector<double> buf;
        const double peak = field_->max_power(sigma, scratch, buf);
        return absorb_ ? -peak : peak;
    }

    bool absorb() const { return absorb_; }

  private:
    bool absorb_;
    std::optional<CellField> field_;
};

LookupEntry search_entry(const EMFunction &f, int m, SearchMethod search, const LookupOptions &opt)
{
    f.validate();
    const EntryObjective objective(f, m, opt);
    const int n = m * m;
    SwitchMatrix best(m);
    double best_value = -std::numeric_limits<double>::infinity();

    if (search == SearchMethod::Exhaustive)
    {
        if (n > 16)
            throw Error("exhaustive lookup search is limited to M*M <= 16");
        // A configuration and its complement have identical patterns and the
        // complement with the leading bit clear has the lower index, so only
        // that half is enumerated. Improvement must exceed rounding noise so
        // that mathematically tied configurations keep the lowest index.
        const std::uint64_t half = std::uint64_t{1} << (n - 1);
        for (std::uint64_t idx = 0; idx < half; ++idx)
        {
            const SwitchMatrix sigma = SwitchMatrix::from_index(m, idx);
            const double v = objective(sigma);
            if (v > best_value + 1e-12 * std::max(1.0, std::abs(best_value)) || idx == 0)
            {
                best_value = v;
                best = sigma;
            }
        }
    }
    else
    {
        GAParams ga;
        ga.population_size = opt.population;
        ga.generations = opt.generations;
        ga.mutation_rate = opt.mutation_rate;
        ga.seed = opt.seed;
        ga.workers = 1;
        const auto to_sigma = [m](const Genome &g) {
            SwitchMatrix s(m);
            for (int c = 0; c < m * m; ++c)
                s.set(c / m, c % m, g[static_cast<std::size_t>(c)] != 0);
            return s;
        };
        const GAResult r =
            ga_run([&](const Genome &g) { return Fitness{objective(to_sigma(g))}; }, ga, 2, n);
        best = to_sigma(r.best);
        // Report the lower-index member of the complement pair.
        if (best.complement().index() < best.index())
            best = best.complement();
        best_value = r.best_fitness[0];
    }
    return LookupEntry{function_key(f), f, best, objective.absorb() ? -best_value : best_value};
}

} // namespace

LookupTable populate_lookup(const std::vector<EMFunction> &catalog, int m, SearchMethod search,
                            const LookupOptions &options)
{
    if (m < 1)
        throw Error("switch matrix size must be at least 1");
    LookupTable table;
    for (const EMFunction &f : catalog)
        table.insert(search_entry(f, m, search, options));
    return table;
}

std::vector<EMFunction> tile_catalog(double wavelength)
{
    Tile local;
    local.true_normal = {0, 0, 1};
    local.axis_u = {1, 0, 0};
    local.axis_v = {0, 1, 0};
    const Vec3 incident{0, 0, -1};

    std::vector<EMFunction> catalog;
    for (int i = 0; i < TileFunction::kCount; ++i)
    {
        const TileFunction tf(i);
        EMFunction f;
        f.incident_doa = incident;
        f.wavelength = wavelength;
        if (tf.is_absorb())
            f.kind = FunctionKind::Absorb;
        else
        {
            f.kind = FunctionKind::Steer;
            f.out_dir = reflect_dir(incident, function_normal(local, tf));
        }
        catalog.push_back(f);
    }
    return catalog;
}

TileFunction quantize_function(const EMFunction &requested, const Tile &tile)
{
    requested.validate();
    if (requested.kind == FunctionKind::Absorb)
        return TileFunction::absorb();

    const Vec3 &target = *requested.out_dir;
    int best = -1;
    double best_err = std::numeric_limits<double>::infinity();
    double best_mag = 0.0;
    for (int i = 0; i < TileFunction::kAbsorbIndex; ++i)
    {
        const TileFunction tf(i);
        const Vec3 n = function_normal(tile, tf);
        if (std::abs(dot(requested.incident_doa, n)) < 1e-9)
            continue;
        const double err = angle_between(reflect_dir(requested.incident_doa, n), target);
        const double mag = std::abs(tf.azimuth_deg()) + std::abs(tf.elevation_deg());
        const bool tie = std::abs(err - best_err) <= 1e-12;
        if ((!tie && err < best_err) || (tie && mag < best_mag))
        {
            best = i;
            best_err = err;
            best_mag = mag;
        }
    }
    if (best < 0)
        throw ParameterError("incident direction is grazing for every steering state");
    return TileFunction(best);
}

// ---------------------------------------------------------------------------
// Lookup table files (YAML):
//
//   version: 1
//   entries:
//     - key: "STEER I=(...) O=(...) L=..."
//       kind: STEER          # or ABSORB
//       incident: [0, 0, -1]
//       out: [0, 0.5, 0.866] # STEER only
//       wavelength: 0.005
//       switches: 4          # M
//       bits: "0110..."      # row-major, cell (0,0) first
//       score: 0.93

std::string dump_lookup(const LookupTable &table)
{
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap << YAML::Key << "version" << YAML::Value << 1;
    out << YAML::Key << "entries" << YAML::Value << YAML::BeginSeq;
    for (const auto &[key, e] : table.entries())
    {
        out << YAML::BeginMap;
        out << YAML::Key << "key" << YAML::Value << YAML::DoubleQuoted << key;
        out << YAML::Key << "kind" << YAML::Value << (e.function.kind == FunctionKind::Absorb ? "ABSORB" : "STEER");
        out << YAML::Key << "incident" << YAML::Value;
        yamlsup::emit_vec3(out, e.function.incident_doa);
        if (e.function.out_dir)
        {
            out << YAML::Key << "out" << YAML::Value;
            yamlsup::emit_vec3(out, *e.function.out_dir);
        }
        out << YAML::Key << "wavelength" << YAML::Value << e.function.wavelength;
        out << YAML::Key << "switches" << YAML::Value << e.best.size();
        out << YAML::Key << "bits" << YAML::Value << YAML::DoubleQuoted << e.best.to_string();
        out << YAML::Key << "score" << YAML::Value << e.score;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

LookupTable parse_lookup(const std::string &text)
{
    using namespace yamlsup;
    const YAML::Node root = parse(text);
    if (require<int>(root, "version") != 1)
        throw SchemaError("unsupported lookup table version", line_of(root["version"]));
    const YAML::Node entries = root["entries"];
    if (!entries || !entries.IsSequence())
        throw SchemaError("'entries' must be a sequence", line_of(root));
    LookupTable table;
    for (const YAML::Node &n : entries)
    {
        LookupEntry e;
        const std::string kind = require<std::string>(n, "kind");
        if (kind != "STEER" && kind != "ABSORB")
            throw SchemaError("unknown function kind '" + kind + "'", line_of(n["kind"]));
        e.function.kind = kind == "STEER" ? FunctionKind::Steer : FunctionKind::Absorb;
        e.function.incident_doa = require_vec3(n, "incident");
        if (n["out"])
            e.function.out_dir = to_vec3(n["out"], "out");
        e.function.wavelength = require<double>(n, "wavelength");
        try
        {
            e.best = SwitchMatrix::from_bits(require<int>(n, "switches"), require<std::string>(n, "bits"));
        }
        catch (const SchemaError &)
        {
            throw;
        }
        catch (const Error &err)
        {
            throw SchemaError(err.what(), line_of(n["bits"]));
        }
        e.score = require<double>(n, "score");
        e.key = require<std::string>(n, "key");
        table.insert(std::move(e));
    }
    return table;
}

} // namespace hypersim
