// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Indoor geometry: planar rectangular surfaces, some of them coated with a
// grid of 1x1 m programmable tiles.
//
// Coordinates put the origin on the floor at the upper-left corner of the
// floorplan: x runs across the corridors (0..10 m), y along them (0..15 m)
// and z up (0..3 m).

#pragma once

#include "hypersim/vec3.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hypersim
{

enum class Material
{
    TiledWall,
    Concrete,
};

using SurfaceId = int;
using TileId = int;

struct Surface
{
    SurfaceId id = 0;
    std::string name;
    Vec3 origin;
    Vec3 edge_u; // horizontal extent for walls
    Vec3 edge_v; // vertical extent for walls
    Material material = Material::Concrete;
    Vec3 true_normal; // points into free space

    // Tile grid, populated for TiledWall surfaces only.
    TileId first_tile = -1;
    int tile_cols = 0; // along edge_u
    int tile_rows = 0; // along edge_v

    bool operator==(const Surface &) const = default;
};

struct Tile
{
    TileId id = 0;
    SurfaceId parent_surface = 0;
    Vec3 center;
    double side = 1.0;
    Vec3 true_normal;
    Vec3 axis_u; // unit, along the parent's edge_u
    Vec3 axis_v; // unit, along the parent's edge_v
    int row = 0; // index along axis_v
    int col = 0; // index along axis_u

    bool operator==(const Tile &) const = default;
};

struct Hit
{
    Vec3 point;
    double distance = 0.0;
    SurfaceId surface = 0;
    std::optional<TileId> tile;
};

/// Immutable once built; safe for concurrent reads.
class Scene
{
  public:
    static constexpr double kEpsilon = 1e-6; // self-intersection offset, m

    explicit Scene(double tile_side = 1.0) : tile_side_(tile_side) {}

    /// Appends a surface. Tiled surfaces must have extents that are whole
    /// multiples of the tile side; tile ids continue row-major from the
    /// previous tiled surface.
    SurfaceId add_surface(std::string name, const Vec3 &origin, const Vec3 &edge_u, const Vec3 &edge_v,
                          Material material, const Vec3 &true_normal);

    const std::vector<Surface> &surfaces() const { return surfaces_; }
    const std::vector<Tile> &tiles() const { return tiles_; }
    const Surface &surface(SurfaceId id) const { return surfaces_.at(static_cast<std::size_t>(id)); }
    const Tile &tile(TileId id) const { return tiles_.at(static_cast<std::size_t>(id)); }
    std::size_t tile_count() const { return tiles_.size(); }
    double tile_side() const { return tile_side_; }

    /// Tile containing a point that lies on a tiled surface.
    std::optional<TileId> tile_at(SurfaceId surface, const Vec3 &point) const;

    /// Nearest hit farther than kEpsilon along a unit direction.
    std::optional<Hit> intersect(const Vec3 &origin, const Vec3 &direction) const;

    bool operator==(const Scene &) const = default;

  private:
    double tile_side_;
    std::vector<Surface> surfaces_;
    std::vector<Tile> tiles_;
};

/// The 15 x 10 x 3 m two-corridor floorplan with a 12 m, 1 m thick middle
/// wall. Every vertical face except the middle wall's end cap is tiled,
/// giving 222 tiles. Tile order follows the faces: west (x=0), south (y=0),
/// east (x=10), north (y=15), middle-west (x=4.5), middle-east (x=5.5).
Scene build_paper_floorplan();

std::optional<Hit> ray_intersect(const Scene &scene, const Vec3 &origin, const Vec3 &direction);

/// Steering angles available per tile, in degrees.
inline constexpr double kCatalogAngles[5] = {-30.0, -15.0, 0.0, 15.0, 30.0};

/// True normal rotated by azimuth about the tile's vertical axis (right-handed)
/// and then by elevation about its horizontal in-plane axis, positive
/// elevation tilting toward +axis_v. Only catalog angles are accepted.
Vec3 virtual_normal(const Tile &tile, double azimuth_deg, double elevation_deg);

// Structured-text scene files (YAML).
Scene load_scene(const std::filesystem::path &path);
Scene parse_scene(const std::string &text);
std::string dump_scene(const Scene &scene);

} // namespace hypersim
