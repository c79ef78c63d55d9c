// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#include "hypersim/scene.hpp"

#include "hypersim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypersim
{
namespace
{

constexpr double kBoundsTol = 1e-9; // relative slack on the rectangle edges

int whole_tiles(double length, double side, const std::string &name)
{
    const double n = length / side;
    const double r = std::round(n);
    if (r < 1.0 || std::abs(n - r) > 1e-9)
        throw Error("surface '" + name + "': extent " + std::to_string(length) +
                    " m is not a whole number of tiles");
    return static_cast<int>(r);
}

} // namespace

SurfaceId Scene::add_surface(std::string name, const Vec3 &origin, const Vec3 &edge_u, const Vec3 &edge_v,
                             Material material, const Vec3 &true_normal)
{
    const double lu = edge_u.norm(), lv = edge_v.norm();
    if (lu <= 0.0 || lv <= 0.0)
        throw Error("surface '" + name + "': degenerate edge");
    if (std::abs(dot(edge_u, edge_v)) > 1e-9 * lu * lv)
        throw Error("surface '" + name + "': edges are not orthogonal");
    const Vec3 n = true_normal.normalized();
    if (std::abs(dot(n, edge_u)) > 1e-9 * lu || std::abs(dot(n, edge_v)) > 1e-9 * lv)
        throw Error("surface '" + name + "': normal is not perpendicular to the edges");

    Surface s;
    s.id = static_cast<SurfaceId>(surfaces_.size());
    s.name = std::move(name);
    s.origin = origin;
    s.edge_u = edge_u;
    s.edge_v = edge_v;
    s.material = material;
    s.true_normal = n;

    if (material == Material::TiledWall)
    {
        s.tile_cols = whole_tiles(lu, tile_side_, s.name);
        s.tile_rows = whole_tiles(lv, tile_side_, s.name);
        s.first_tile = static_cast<TileId>(tiles_.size());
        const Vec3 au = edge_u / lu, av = edge_v / lv;
        for (int row = 0; row < s.tile_rows; ++row)
            for (int col = 0; col < s.tile_cols; ++col)
            {
                Tile t;
                t.id = static_cast<TileId>(tiles_.size());
                t.parent_surface = s.id;
                t.side = tile_side_;
                t.center = origin + au * ((col + 0.5) * tile_side_) + av * ((row + 0.5) * tile_side_);
                t.true_normal = n;
                t.axis_u = au;
                t.axis_v = av;
                t.row = row;
                t.col = col;
                tiles_.push_back(t);
            }
    }
    surfaces_.push_back(std::move(s));
    return surfaces_.back().id;
}

std::optional<TileId> Scene::tile_at(SurfaceId id, const Vec3 &point) const
{
    const Surface &s = surface(id);
    if (s.material != Material::TiledWall)
        return std::nullopt;
    const Vec3 rel = point - s.origin;
    const double a = dot(rel, s.edge_u) / dot(s.edge_u, s.edge_u);
    const double b = dot(rel, s.edge_v) / dot(s.edge_v, s.edge_v);
    const int col = std::clamp(static_cast<int>(std::floor(a * s.tile_cols)), 0, s.tile_cols - 1);
    const int row = std::clamp(static_cast<int>(std::floor(b * s.tile_rows)), 0, s.tile_rows - 1);
    return s.first_tile + row * s.tile_cols + col;
}

std::optional<Hit> Scene::intersect(const Vec3 &origin, const Vec3 &direction) const
{
    double best = std::numeric_limits<double>::infinity();
    const Surface *hit_surface = nullptr;
    Vec3 hit_point;
    for (const Surface &s : surfaces_)
    {
        const double denom = dot(s.true_normal, direction);
        if (std::abs(denom) < 1e-12)
            continue;
        const double t = dot(s.true_normal, s.origin - origin) / denom;
        if (t <= kEpsilon || t >= best)
            continue;
        const Vec3 q = origin + direction * t;
        const Vec3 rel = q - s.origin;
        const double a = dot(rel, s.edge_u) / dot(s.edge_u, s.edge_u);
        const double b = dot(rel, s.edge_v) / dot(s.edge_v, s.edge_v);
        if (a < -kBoundsTol || a > 1.0 + kBoundsTol || b < -kBoundsTol || b > 1.0 + kBoundsTol)
            continue;
        best = t;
        hit_surface = &s;
        hit_point = q;
    }
    if (!hit_surface)
        return std::nullopt;
    return Hit{hit_point, best, hit_surface->id, tile_at(hit_surface->id, hit_point)};
}

std::optional<Hit> ray_intersect(const Scene &scene, const Vec3 &origin, const Vec3 &direction)
{
    return scene.intersect(origin, direction);
}

Scene build_paper_floorplan()
{
    constexpr double H = 3.0;        // room height
    constexpr double L = 15.0;       // corridor length
    constexpr double X = 10.0;       // outer box width across both corridors
    constexpr double mid_x0 = 4.5;   // middle wall west face (corridor width W)
    constexpr double mid_x1 = 5.5;   // two stacked 0.5 m walls
    constexpr double mid_y0 = L - 12.0; // 12 m middle wall leaves a 3 m opening

    Scene s(1.0);
    const Vec3 up{0, 0, H};
    s.add_surface("west", {0, 0, 0}, {0, L, 0}, up, Material::TiledWall, {1, 0, 0});
    s.add_surface("south", {0, 0, 0}, {X, 0, 0}, up, Material::TiledWall, {0, 1, 0});
    s.add_surface("east", {X, 0, 0}, {0, L, 0}, up, Material::TiledWall, {-1, 0, 0});
    s.add_surface("north", {0, L, 0}, {X, 0, 0}, up, Material::TiledWall, {0, -1, 0});
    s.add_surface("middle-west", {mid_x0, mid_y0, 0}, {0, L - mid_y0, 0}, up, Material::TiledWall, {-1, 0, 0});
    s.add_surface("middle-east", {mid_x1, mid_y0, 0}, {0, L - mid_y0, 0}, up, Material::TiledWall, {1, 0, 0});
    s.add_surface("middle-cap", {mid_x0, mid_y0, 0}, {mid_x1 - mid_x0, 0, 0}, up, Material::Concrete, {0, -1, 0});
    s.add_surface("floor", {0, 0, 0}, {X, 0, 0}, {0, L, 0}, Material::Concrete, {0, 0, 1});
    s.add_surface("ceiling", {0, 0, H}, {X, 0, 0}, {0, L, 0}, Material::Concrete, {0, 0, -1});
    return s;
}

Vec3 virtual_normal(const Tile &tile, double azimuth_deg, double elevation_deg)
{
    auto in_catalog = [](double a) {
        return std::any_of(std::begin(kCatalogAngles), std::end(kCatalogAngles),
                           [a](double c) { return std::abs(a - c) < 1e-9; });
    };
    if (!in_catalog(azimuth_deg) || !in_catalog(elevation_deg))
        throw InvalidAngleError("steering angle (" + std::to_string(azimuth_deg) + ", " +
                                std::to_string(elevation_deg) + ") deg is not in the tile catalog");

    const Vec3 n = tile.true_normal;
    const Vec3 horizontal = cross(n, tile.axis_v);
    const Vec3 turned = rotate(n, tile.axis_v, deg2rad(azimuth_deg));
    return rotate(turned, horizontal, deg2rad(elevation_deg)).normalized();
}

} // namespace hypersim
