// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// EM function catalog of a tile and the function-to-switch-configuration
// lookup table.
//
// The unit-cell array is modelled as a binary-phase reflectarray: cell (i,j)
// re-radiates the incident wave with an extra phase of 0 (switch open) or pi
// (switch closed). The far-field power pattern is the squared array factor,
// normalised so that a fully coherent array reaches 1.

#pragma once

#include "hypersim/scene.hpp"
#include "hypersim/vec3.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hypersim
{

enum class FunctionKind
{
    Steer,
    Absorb,
};

/// A requested EM behaviour. Directions are propagation directions: the
/// incident wave travels along incident_doa, the steered wave leaves along
/// out_dir.
struct EMFunction
{
    FunctionKind kind = FunctionKind::Steer;
    Vec3 incident_doa;
    std::optional<Vec3> out_dir; // required for Steer, forbidden for Absorb
    double wavelength = 0.0;     // m

    /// Throws ParameterError when out_dir does not match the kind.
    void validate() const;
};

/// One of the 26 states a tile can hold: 25 steering states (azimuth x
/// elevation over the catalog angles) plus Absorb. Index layout is
/// azimuth-major, az_idx * 5 + el_idx, and 25 for Absorb.
class TileFunction
{
  public:
    static constexpr int kCount = 26;
    static constexpr int kAbsorbIndex = 25;
    static constexpr int kPlainIndex = 12; // Steer{0, 0}

    constexpr TileFunction() = default;
    explicit TileFunction(int index);

    static TileFunction steer(double azimuth_deg, double elevation_deg);
    static constexpr TileFunction absorb() { return TileFunction(Raw{kAbsorbIndex}); }
    static constexpr TileFunction plain() { return TileFunction(Raw{kPlainIndex}); }

    constexpr int index() const { return index_; }
    constexpr bool is_absorb() const { return index_ == kAbsorbIndex; }
    double azimuth_deg() const;   // 0 for Absorb
    double elevation_deg() const; // 0 for Absorb
    std::string name() const;

    constexpr bool operator==(const TileFunction &) const = default;

  private:
    struct Raw
    {
        int v;
    };
    constexpr explicit TileFunction(Raw r) : index_(r.v) {}
    int index_ = kPlainIndex;
};

/// Reflection normal a tile uses for its current function; Absorb keeps the
/// geometric normal and only attenuates.
Vec3 function_normal(const Tile &tile, TileFunction f);

/// Switch states s_ij of an M x M unit-cell array, row-major.
class SwitchMatrix
{
  public:
    explicit SwitchMatrix(int m = 1);
    /// Row-major binary order: cell (0,0) is the most significant bit.
    static SwitchMatrix from_index(int m, std::uint64_t index);
    static SwitchMatrix from_bits(int m, const std::string &bits);

    int size() const { return m_; }
    int cell_count() const { return m_ * m_; }
    std::uint8_t at(int i, int j) const { return bits_[static_cast<std::size_t>(i * m_ + j)]; }
    void set(int i, int j, bool on) { bits_[static_cast<std::size_t>(i * m_ + j)] = on ? 1 : 0; }
    const std::vector<std::uint8_t> &bits() const { return bits_; }
    std::uint64_t index() const;
    SwitchMatrix complement() const;
    std::string to_string() const;

    bool operator==(const SwitchMatrix &) const = default;

  private:
    int m_;
    std::vector<std::uint8_t> bits_;
};

/// Power pattern sampled on a regular grid over the open hemisphere
/// azimuth, elevation in (-90, 90) degrees.
struct ReflectionPattern
{
    std::vector<double> azimuth_deg;
    std::vector<double> elevation_deg;
    std::vector<double> power; // [elevation][azimuth], linear, >= 0

    double at(std::size_t el, std::size_t az) const { return power[el * azimuth_deg.size() + az]; }
    double max() const;
};

/// Tile-local frame used by the pattern model: cells span the x-y plane,
/// the tile normal is +z. (azimuth, elevation) maps to
/// (cos el sin az, sin el, cos el cos az).
Vec3 pattern_direction(double azimuth_deg, double elevation_deg);

ReflectionPattern array_pattern(const SwitchMatrix &sigma, const Vec3 &incident, double wavelength,
                                double cell_pitch, double grid_step_deg = 1.0);

/// Pattern value in one direction (not restricted to the grid).
double pattern_power(const SwitchMatrix &sigma, const Vec3 &incident, const Vec3 &direction, double wavelength,
                     double cell_pitch);

enum class SearchMethod
{
    Exhaustive,
    Genetic,
};

struct LookupOptions
{
    double cell_pitch_fraction = 0.5; // cell pitch as a fraction of the wavelength
    double grid_step_deg = 1.0;
    // Genetic search budget.
    int population = 40;
    int generations = 80;
    double mutation_rate = 0.05;
    std::uint64_t seed = 1;
};

struct LookupEntry
{
    std::string key;
    EMFunction function;
    SwitchMatrix best;
    double score = 0.0; // ABSORB: pattern maximum (lower is better); STEER: power toward out_dir
};

class LookupTable
{
  public:
    void insert(LookupEntry entry);
    const LookupEntry &at(const std::string &key) const;
    const LookupEntry *find(const std::string &key) const;
    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, LookupEntry> &entries() const { return entries_; }

  private:
    std::map<std::string, LookupEntry> entries_;
};

/// Canonical key of a function (kind plus directions at 1e-6 resolution).
std::string function_key(const EMFunction &f);

/// Populates the table. ABSORB entries minimise the pattern maximum over the
/// grid; STEER entries maximise the power toward out_dir. Exhaustive search
/// needs M*M <= 16. Ties resolve to the lowest row-major index.
LookupTable populate_lookup(const std::vector<EMFunction> &catalog, int m, SearchMethod search,
                            const LookupOptions &options = {});

/// The 26 tile states expressed as EM functions in the tile-local frame at
/// normal incidence.
std::vector<EMFunction> tile_catalog(double wavelength);

/// Maps a continuous request onto the catalog: the steering state whose
/// reflection of incident_doa is closest to out_dir (ties toward smaller
/// angles), or Absorb.
TileFunction quantize_function(const EMFunction &requested, const Tile &tile);

std::string dump_lookup(const LookupTable &table);
LookupTable parse_lookup(const std::string &text);

} // namespace hypersim
