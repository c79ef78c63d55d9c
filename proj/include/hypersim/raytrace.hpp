// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Shooting-and-bouncing-rays propagation over a tiled scene.
//
// Rays leave the transmitter on a Fibonacci sphere. At a tile the ray is
// mirrored about the normal of the tile's current function (the geometric
// normal virtually rotated by the steering angles), at concrete about the
// geometric normal. A receiver captures a ray segment that passes within
// scale * alpha * r of it, alpha being the angular ray spacing and r the
// unfolded distance travelled so far. No transmission or diffraction.

#pragma once

#include "hypersim/emfunc.hpp"
#include "hypersim/scene.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hypersim
{

struct RadioParams
{
    double frequency = 60e9;   // Hz
    double bandwidth = 25e6;   // Hz
    double tx_power_dbm = 100; // dBmW
    Vec3 tx_position{7.0, 12.0, 2.0};
    std::vector<Vec3> rx_positions;
    int max_bounces = 3;
    int ray_count = 200000;
    // Reception sphere radius = reception_scale * alpha * r. The default
    // covers the sphere for a hexagonal ray lattice (1.075 / sqrt 3).
    double reception_scale = 0.6207;
    double power_floor_dbm = -250.0;
    double concrete_loss_db = 13.0; // per bounce
    double absorb_loss_db = 35.0;   // per bounce on an absorbing tile
    int workers = 1;                // 0: hardware concurrency

    double wavelength() const { return kSpeedOfLight / frequency; }
    /// Angular spacing of the launch lattice in radians.
    double ray_spacing() const;
    void validate() const;
};

/// Reference scenario: Tx at (7, 12, 2) m, 100 dBmW, 25 MHz, the 2 x 6 receiver
/// grid, and a band-dependent concrete loss (13 dB above 10 GHz, 7 dB below).
RadioParams paper_radio(double frequency);

/// 2 x 6 grid at 2.5 m pitch centred in x in [0, 4], y in [0, 15], z = 1.5 m,
/// ordered y-major (receiver k is at x index k % 2, y index k / 2).
std::vector<Vec3> paper_receivers();

struct EnvConfiguration
{
    std::vector<TileFunction> states;

    static EnvConfiguration plain(std::size_t tile_count);
    static EnvConfiguration uniform(std::size_t tile_count, TileFunction f);
    static EnvConfiguration from_genome(const std::vector<int> &genome);
    std::vector<int> to_genome() const;

    bool operator==(const EnvConfiguration &) const = default;
};

struct PropagationPath
{
    std::vector<Hit> bounce_points;
    Vec3 departure;               // unit direction leaving the transmitter
    Vec3 arrival;                 // unit propagation direction of the last segment
    double unfolded_length = 0.0; // m
    double delay = 0.0;           // s
    double bounce_loss_db = 0.0;
    double attenuation = 0.0;     // linear amplitude relative to the transmitted wave
    double rx_power_dbm = 0.0;
    double phase = 0.0;           // rad, bounce-induced only
    bool disconnected = false;    // power clamped at the floor
    double miss_distance = 0.0;   // closest approach of the capturing ray, m

    std::size_t bounce_count() const { return bounce_points.size(); }
};

/// Paths per receiver, indexed like RadioParams::rx_positions.
using PathSet = std::vector<std::vector<PropagationPath>>;

/// incident - 2 (incident . normal) normal. Throws GrazingError when the
/// incident direction lies in the plane.
Vec3 reflect_dir(const Vec3 &incident, const Vec3 &normal);

/// Free-space loss 20 log10(4 pi d / lambda) in dB.
double friis_loss_db(double frequency, double distance);

/// Half-wave dipole power gain at an angle from its axis; 0 at the poles.
double dipole_gain(double angle_from_axis);

/// Gain in dBi of a vertical (z-axis) dipole toward a direction; -inf on axis.
double vertical_dipole_gain_db(const Vec3 &direction);

/// Launch directions: n points on a golden-angle spiral.
std::vector<Vec3> fibonacci_sphere(int n);

/// Reusable tracer: launch directions and the configuration-independent
/// first segment of every ray are computed once per (scene, radio params).
class RayTracer
{
  public:
    RayTracer(const Scene &scene, RadioParams params);

    const Scene &scene() const { return *scene_; }
    const RadioParams &params() const { return params_; }

    /// Thread-safe; results are independent of params.workers.
    PathSet trace(const EnvConfiguration &config, std::uint64_t seed = 0) const;

  private:
    struct FirstHit
    {
        Vec3 point;
        double distance;
        SurfaceId surface; // -1 when the ray escapes
        TileId tile;       // -1 for untiled surfaces
    };

    const Scene *scene_;
    RadioParams params_;
    std::vector<Vec3> directions_;
    std::vector<FirstHit> first_hits_;
};

PathSet launch_rays(const Scene &scene, const EnvConfiguration &config, const RadioParams &params,
                    std::uint64_t seed = 0);

/// CSV with columns rx_index, bounces, length_m, delay_ns, power_dbm.
void write_paths_csv(std::ostream &out, const PathSet &paths);

} // namespace hypersim
