// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#include "hypersim/raytrace.hpp"

#include "hypersim/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <tuple>

namespace hypersim
{

Vec3 reflect_dir(const Vec3 &incident, const Vec3 &normal)
{
    const double c = dot(incident, normal);
    if (std::abs(c) < 1e-9)
        throw GrazingError("grazing incidence: direction lies in the reflecting plane");
    return (incident - normal * (2.0 * c)).normalized();
}

double friis_loss_db(double frequency, double distance)
{
    if (!(distance > 0.0))
        throw Error("friis_loss_db: distance must be positive");
    const double lambda = kSpeedOfLight / frequency;
    return 20.0 * std::log10(4.0 * kPi * distance / lambda);
}

double dipole_gain(double angle_from_axis)
{
    const double s = std::sin(angle_from_axis);
    if (std::abs(s) < 1e-12)
        return 0.0;
    // cos(pi/2 cos t) rewritten as sin(pi sin^2(t/2)) to stay accurate near the axis.
    const double h = std::sin(0.5 * angle_from_axis);
    const double f = std::sin(kPi * h * h) / s;
    return 1.64 * f * f;
}

double vertical_dipole_gain_db(const Vec3 &direction)
{
    const double theta = std::acos(std::clamp(direction.z / direction.norm(), -1.0, 1.0));
    const double g = dipole_gain(theta);
    return g > 0.0 ? 10.0 * std::log10(g) : -std::numeric_limits<double>::infinity();
}

std::vector<Vec3> fibonacci_sphere(int n)
{
    if (n < 1)
        throw Error("ray_count must be at least 1");
    std::vector<Vec3> dirs(static_cast<std::size_t>(n));
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i)
    {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        dirs[static_cast<std::size_t>(i)] = {r * std::cos(phi), r * std::sin(phi), z};
    }
    return dirs;
}

double RadioParams::ray_spacing() const
{
    return std::sqrt(4.0 * kPi / ray_count);
}

void RadioParams::validate() const
{
    if (ray_count < 1)
        throw Error("ray_count must be at least 1");
    if (max_bounces < 0)
        throw Error("max_bounces must be non-negative");
    if (!(frequency > 0.0))
        throw Error("frequency must be positive");
    if (!(reception_scale > 0.0))
        throw Error("reception_scale must be positive");
}

std::vector<Vec3> paper_receivers()
{
    std::vector<Vec3> rx;
    for (int iy = 0; iy < 6; ++iy)
        for (int ix = 0; ix < 2; ++ix)
            rx.push_back({0.75 + 2.5 * ix, 1.25 + 2.5 * iy, 1.5});
    return rx;
}

RadioParams paper_radio(double frequency)
{
    RadioParams p;
    p.frequency = frequency;
    p.rx_positions = paper_receivers();
    p.concrete_loss_db = frequency > 10e9 ? 13.0 : 7.0;
    return p;
}

EnvConfiguration EnvConfiguration::plain(std::size_t tile_count)
{
    return uniform(tile_count, TileFunction::plain());
}

EnvConfiguration EnvConfiguration::uniform(std::size_t tile_count, TileFunction f)
{
    return {std::vector<TileFunction>(tile_count, f)};
}

EnvConfiguration EnvConfiguration::from_genome(const std::vector<int> &genome)
{
    EnvConfiguration c;
    c.states.reserve(genome.size());
    for (int g : genome)
        c.states.emplace_back(g);
    return c;
}

std::vector<int> EnvConfiguration::to_genome() const
{
    std::vector<int> g;
    g.reserve(states.size());
    for (const TileFunction &f : states)
        g.push_back(f.index());
    return g;
}

namespace
{

// Facet codes in the deduplication key. Coplanar specular facets of one
// surface form a single mirror, so they share a code; a steered tile is its
// own facet.
constexpr int kFacetSpecular = -1;
constexpr int kFacetAbsorb = -2;

struct Candidate
{
    std::size_t rx;
    std::vector<std::int64_t> key;
    double miss;
    std::uint64_t tie;
    std::size_t ray;
    PropagationPath path;
};

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Bounce
{
    Hit hit;
    std::int64_t key;
    double loss_db;
    double phase;
};

// Per-trace state: the surfaces' reflection behaviour under one configuration.
struct TileBehaviour
{
    Vec3 normal;
    double loss_db;
    int facet;
};

class RayWalker
{
  public:
    RayWalker(const Scene &scene, const RadioParams &p, std::uint64_t seed) : scene_(scene), p_(p), seed_(seed)
    {
        alpha_scale_ = p.reception_scale * p.ray_spacing();
    }

    void capture_segment(std::size_t ray, const Vec3 &origin, const Vec3 &dir, double seg_len, double travelled,
                         const Vec3 &departure, const std::vector<Bounce> &bounces, std::vector<Candidate> &out) const
    {
        for (std::size_t j = 0; j < p_.rx_positions.size(); ++j)
        {
            const Vec3 w = p_.rx_positions[j] - origin;
            const double s = dot(w, dir);
            if (s <= 0.0 || s >= seg_len)
                continue;
            const double miss2 = std::max(0.0, dot(w, w) - s * s);
            const double r = travelled + s;
            const double radius = alpha_scale_ * r;
            if (miss2 > radius * radius)
                continue;
            out.push_back(make_candidate(j, ray, std::sqrt(miss2), r, departure, dir, bounces));
        }
    }

  private:
    Candidate make_candidate(std::size_t rx, std::size_t ray, double miss, double length, const Vec3 &departure,
                             const Vec3 &arrival, const std::vector<Bounce> &bounces) const
    {
        Candidate c;
        c.rx = rx;
        c.miss = miss;
        c.ray = ray;
        c.tie = splitmix64(static_cast<std::uint64_t>(ray) ^ seed_);
        PropagationPath &path = c.path;
        path.departure = departure;
        path.arrival = arrival;
        path.unfolded_length = length;
        path.delay = length / kSpeedOfLight;
        path.miss_distance = miss;
        for (const Bounce &b : bounces)
        {
            c.key.push_back(b.key);
            path.bounce_points.push_back(b.hit);
            path.bounce_loss_db += b.loss_db;
            path.phase += b.phase;
        }
        path.phase = std::fmod(path.phase, 2.0 * kPi);
        const double gains = vertical_dipole_gain_db(departure) + vertical_dipole_gain_db(arrival);
        double power = p_.tx_power_dbm - friis_loss_db(p_.frequency, length) - path.bounce_loss_db + gains;
        if (!(power >= p_.power_floor_dbm))
        {
            power = p_.power_floor_dbm;
            path.disconnected = true;
        }
        path.rx_power_dbm = power;
        path.attenuation = std::pow(10.0, (power - p_.tx_power_dbm) / 20.0);
        return c;
    }

    const Scene &scene_;
    const RadioParams &p_;
    std::uint64_t seed_;
    double alpha_scale_ = 0.0;
};

std::int64_t bounce_key(SurfaceId surface, int facet)
{
    return (static_cast<std::int64_t>(surface) << 32) | static_cast<std::uint32_t>(facet);
}

} // namespace

RayTracer::RayTracer(const Scene &scene, RadioParams params)
    : scene_(&scene), params_(std::move(params)), directions_(fibonacci_sphere(params_.ray_count))
{
    params_.validate();
    first_hits_.resize(directions_.size());
    detail::parallel_for(directions_.size(), params_.workers, [&](std::size_t i) {
        const auto hit = scene.intersect(params_.tx_position, directions_[i]);
        if (hit)
            first_hits_[i] = {hit->point, hit->distance, hit->surface, hit->tile.value_or(-1)};
        else
            first_hits_[i] = {{}, std::numeric_limits<double>::infinity(), -1, -1};
    });
}

PathSet RayTracer::trace(const EnvConfiguration &config, std::uint64_t seed) const
{
    const Scene &scene = *scene_;
    if (config.states.size() != scene.tile_count())
        throw Error("configuration length " + std::to_string(config.states.size()) + " does not match " +
                    std::to_string(scene.tile_count()) + " tiles");

    std::vector<TileBehaviour> tiles(scene.tile_count());
    for (const Tile &t : scene.tiles())
    {
        const TileFunction f = config.states[static_cast<std::size_t>(t.id)];
        TileBehaviour &b = tiles[static_cast<std::size_t>(t.id)];
        b.normal = function_normal(t, f);
        b.loss_db = f.is_absorb() ? params_.absorb_loss_db : 0.0;
        b.facet = f.is_absorb() ? kFacetAbsorb : (f == TileFunction::plain() ? kFacetSpecular : t.id);
    }

    const RayWalker walker(scene, params_, seed);
    const std::size_t n = directions_.size();
    const std::size_t chunks = std::min<std::size_t>(n, static_cast<std::size_t>(detail::resolve_workers(params_.workers)) * 8);
    std::vector<std::vector<Candidate>> found(chunks);

    detail::parallel_for(chunks, params_.workers, [&](std::size_t c) {
        std::vector<Bounce> bounces;
        bounces.reserve(static_cast<std::size_t>(params_.max_bounces));
        std::vector<Candidate> &out = found[c];
        const std::size_t begin = n * c / chunks, end = n * (c + 1) / chunks;
        for (std::size_t ray = begin; ray < end; ++ray)
        {
            bounces.clear();
            const Vec3 departure = directions_[ray];
            const FirstHit &first = first_hits_[ray];
            Vec3 pos = params_.tx_position, dir = departure;
            double travelled = 0.0;
            Hit hit{first.point, first.distance, first.surface,
                    first.tile >= 0 ? std::optional<TileId>(first.tile) : std::nullopt};
            bool has_hit = first.surface >= 0;

            for (int b = 0;; ++b)
            {
                walker.capture_segment(ray, pos, dir, has_hit ? hit.distance : std::numeric_limits<double>::infinity(),
                                       travelled, departure, bounces, out);
                if (!has_hit || b == params_.max_bounces)
                    break;

                const Surface &s = scene.surface(hit.surface);
                Vec3 normal = s.true_normal;
                double loss = params_.concrete_loss_db;
                int facet = kFacetSpecular;
                double phase = kPi;
                if (hit.tile)
                {
                    const TileBehaviour &tb = tiles[static_cast<std::size_t>(*hit.tile)];
                    normal = tb.normal;
                    loss = tb.loss_db;
                    facet = tb.facet;
                    phase = 0.0;
                }
                const double facing = dot(dir, s.true_normal);
                if (std::abs(facing) < 1e-9 || std::abs(dot(dir, normal)) < 1e-9)
                    break;
                const Vec3 out_dir = reflect_dir(dir, normal);
                // The reflected ray has to leave on the side it arrived from.
                if (dot(out_dir, s.true_normal) * facing >= -1e-12)
                    break;

                bounces.push_back({hit, bounce_key(hit.surface, facet), loss, phase});
                travelled += hit.distance;
                pos = hit.point;
                dir = out_dir;
                const auto next = scene.intersect(pos, dir);
                has_hit = next.has_value();
                if (has_hit)
                    hit = *next;
            }
        }
    });

    std::vector<Candidate> all;
    for (auto &v : found)
        std::move(v.begin(), v.end(), std::back_inserter(all));
    std::sort(all.begin(), all.end(), [](const Candidate &a, const Candidate &b) {
        return std::tie(a.rx, a.key, a.miss, a.tie, a.ray) < std::tie(b.rx, b.key, b.miss, b.tie, b.ray);
    });

    PathSet result(params_.rx_positions.size());
    for (std::size_t i = 0; i < all.size(); ++i)
    {
        if (i > 0 && all[i].rx == all[i - 1].rx && all[i].key == all[i - 1].key)
            continue;
        result[all[i].rx].push_back(std::move(all[i].path));
    }
    for (auto &paths : result)
        std::stable_sort(paths.begin(), paths.end(), [](const PropagationPath &a, const PropagationPath &b) {
            return a.unfolded_length < b.unfolded_length;
        });
    return result;
}

PathSet launch_rays(const Scene &scene, const EnvConfiguration &config, const RadioParams &params,
                    std::uint64_t seed)
{
    return RayTracer(scene, params).trace(config, seed);
}

void write_paths_csv(std::ostream &out, const PathSet &paths)
{
    out << "rx_index,bounces,length_m,delay_ns,power_dbm\n";
    out << std::fixed;
    for (std::size_t rx = 0; rx < paths.size(); ++rx)
        for (const PropagationPath &p : paths[rx])
            out << rx << ',' << p.bounce_count() << ',' << std::setprecision(6) << p.unfolded_length << ','
                << std::setprecision(6) << p.delay * 1e9 << ',' << std::setprecision(4) << p.rx_power_dbm << '\n';
}

} // namespace hypersim
