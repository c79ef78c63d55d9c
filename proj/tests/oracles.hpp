// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Independent reference computations shared by the unit tests and the
// acceptance suite. Nothing here calls into the code under test beyond
// plain data types.

#pragma once

#include "hypersim/controlnet.hpp"
#include "hypersim/optimize.hpp"
#include "hypersim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <queue>
#include <set>
#include <vector>

namespace hypersim::oracle
{

inline constexpr double kLightSpeed = 299792458.0;

inline double friis_db(double frequency, double distance)
{
    return 20.0 * std::log10(4.0 * kPi * distance * frequency / kLightSpeed);
}

// Vertical half-wave dipole, 1.64 peak gain.
inline double dipole_db(const Vec3 &dir)
{
    const double th = std::acos(std::clamp(dir.z / dir.norm(), -1.0, 1.0));
    const double g = 1.64 * std::pow(std::cos(kPi / 2 * std::cos(th)) / std::sin(th), 2);
    return 10.0 * std::log10(g);
}

// 40 x 40 m tiled mirror in the plane x = 0, facing +x.
inline Scene mirror_scene()
{
    Scene s;
    s.add_surface("mirror", {0, -20, -20}, {0, 40, 0}, {0, 0, 40}, Material::TiledWall, {1, 0, 0});
    return s;
}

struct ImagePath
{
    double length = 0.0;
    Vec3 specular_point;
    double power_dbm = 0.0;
};

// Single lossless bounce off the x = 0 plane by the image method.
inline ImagePath mirror_image_path(const Vec3 &tx, const Vec3 &rx, double frequency, double tx_power_dbm)
{
    ImagePath r;
    const Vec3 image{-tx.x, tx.y, tx.z};
    r.length = distance(image, rx);
    const double t = tx.x / (tx.x + rx.x);
    r.specular_point = Vec3{0, tx.y + t * (rx.y - tx.y), tx.z + t * (rx.z - tx.z)};
    const Vec3 dep = (r.specular_point - tx).normalized(), arr = (rx - r.specular_point).normalized();
    r.power_dbm = tx_power_dbm - friis_db(frequency, r.length) + dipole_db(dep) + dipole_db(arr);
    return r;
}

// Binary-phase array factor: cell (i, j) at (j d, i d), bit 1 adds pi,
// normalised so an in-phase array peaks at 1.
inline double array_power(const std::vector<int> &bits, int m, const Vec3 &inc, const Vec3 &out, double pitch,
                          double wavelength)
{
    const double k = 2.0 * kPi / wavelength;
    std::complex<double> sum = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
        {
            const double phase = k * pitch * (j * (out.x - inc.x) + i * (out.y - inc.y));
            const double sign = bits[static_cast<std::size_t>(i * m + j)] ? -1.0 : 1.0;
            sum += sign * std::polar(1.0, phase);
        }
    return std::norm(sum) / std::pow(m * m, 2);
}

// Row-major cells, first cell is the most significant bit.
inline std::vector<int> bits_of(int m, std::uint64_t index)
{
    std::vector<int> b(static_cast<std::size_t>(m * m));
    for (int c = 0; c < m * m; ++c)
        b[static_cast<std::size_t>(c)] = static_cast<int>((index >> (m * m - 1 - c)) & 1U);
    return b;
}

// Directions over the open (-90, 90) azimuth/elevation square.
inline std::vector<Vec3> pattern_grid(double step)
{
    std::vector<Vec3> dirs;
    for (double el = -90.0 + step; el < 90.0 - 1e-9; el += step)
        for (double az = -90.0 + step; az < 90.0 - 1e-9; az += step)
        {
            const double a = deg2rad(az), e = deg2rad(el);
            dirs.push_back({std::cos(e) * std::sin(a), std::sin(e), std::cos(e) * std::cos(a)});
        }
    return dirs;
}

// Flood fill from every live entry point over live gateways.
inline std::set<TileId> reachable(const Network &net)
{
    std::set<TileId> seen;
    std::queue<TileId> q;
    for (TileId e : net.entry_points())
        if (net.gateway(e).live() && seen.insert(e).second)
            q.push(e);
    while (!q.empty())
    {
        const TileId t = q.front();
        q.pop();
        for (TileId n : net.gateway(t).neighbors)
            if (net.gateway(n).live() && seen.insert(n).second)
                q.push(n);
    }
    return seen;
}

// Exhaustive enumeration of every power-level and tile split.
inline double best_allocation(const MultiUserProblem &prob, const UserGain &gain, std::size_t *states = nullptr)
{
    const std::size_t users = prob.rx_positions.size();
    const auto w = prob.resolved_weights();
    const double q = prob.total_power_mw / prob.power_levels;
    double best = -1e300;
    std::size_t visited = 0;
    std::function<void(std::size_t, int, int, double)> rec = [&](std::size_t j, int p_left, int t_left, double acc) {
        if (j == users)
        {
            ++visited;
            best = std::max(best, acc);
            return;
        }
        for (int a = 0; a <= p_left; ++a)
            for (int b = 0; b <= t_left; ++b)
                rec(j + 1, p_left - a, t_left - b, acc + w[j] * gain(j, a * q, b));
    };
    rec(0, prob.power_levels, prob.total_tiles, 0.0);
    if (states)
        *states = visited;
    return best;
}

} // namespace hypersim::oracle
