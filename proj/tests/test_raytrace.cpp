// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#include "hypersim/errors.hpp"
#include "hypersim/raytrace.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

using namespace hypersim;
using Catch::Approx;
using oracle::mirror_scene;

namespace
{

RadioParams radio_for(const Vec3 &tx, std::vector<Vec3> rx, int bounces = 1)
{
    RadioParams p;
    p.tx_position = tx;
    p.rx_positions = std::move(rx);
    p.max_bounces = bounces;
    return p;
}

const PropagationPath *path_with_bounces(const std::vector<PropagationPath> &paths, std::size_t n)
{
    const PropagationPath *found = nullptr;
    for (const PropagationPath &p : paths)
        if (p.bounce_count() == n)
        {
            REQUIRE(found == nullptr);
            found = &p;
        }
    return found;
}

void require_same_paths(const PathSet &a, const PathSet &b)
{
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j)
    {
        REQUIRE(a[j].size() == b[j].size());
        for (std::size_t k = 0; k < a[j].size(); ++k)
        {
            const PropagationPath &p = a[j][k], &q = b[j][k];
            REQUIRE(p.unfolded_length == q.unfolded_length);
            REQUIRE(p.rx_power_dbm == q.rx_power_dbm);
            REQUIRE(p.departure == q.departure);
            REQUIRE(p.bounce_count() == q.bounce_count());
            for (std::size_t h = 0; h < p.bounce_count(); ++h)
                REQUIRE(p.bounce_points[h].tile == q.bounce_points[h].tile);
        }
    }
}

} // namespace

TEST_CASE("reflect_dir mirrors about the normal", "[raytrace]")
{
    CHECK(distance(reflect_dir({0, 0, -1}, {0, 0, 1}), {0, 0, 1}) < 1e-15);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(distance(reflect_dir({s, 0, -s}, {0, 0, 1}), {s, 0, s}) < 1e-15);
    const double a = deg2rad(15.0);
    const Vec3 r = reflect_dir({0, 0, -1}, {0, std::sin(a), std::cos(a)});
    CHECK(r.x == Approx(0.0).margin(1e-15));
    CHECK(r.y == Approx(0.5).margin(1e-12));
    CHECK(r.z == Approx(0.86603).margin(1e-5));
    CHECK(r.norm() == Approx(1.0).margin(1e-12));
}

TEST_CASE("reflect_dir rejects grazing incidence", "[raytrace]")
{
    CHECK_THROWS_AS(reflect_dir({1, 0, 0}, {0, 0, 1}), GrazingError);
    CHECK_THROWS_AS(reflect_dir({1, 0, 1e-12}, {0, 0, 1}), GrazingError);
}

TEST_CASE("Friis loss matches the closed form", "[raytrace]")
{
    CHECK(friis_loss_db(60e9, 10.0) == Approx(88.0108).margin(1e-4));
    CHECK(friis_loss_db(60e9, 10.0) == Approx(88.0).margin(0.1));
    CHECK(friis_loss_db(2.4e9, 10.0) == Approx(60.0520).margin(1e-4));
    CHECK(friis_loss_db(2.4e9, 10.0) == Approx(60.1).margin(0.1));
    const double lambda = 299792458.0 / 5e9;
    CHECK(friis_loss_db(5e9, lambda / (4 * kPi)) == Approx(0.0).margin(1e-12));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(0.1, 100.0);
    for (int i = 0; i < 100; ++i)
    {
        const double r = d(rng);
        CHECK(friis_loss_db(2.4e9, r) == Approx(oracle::friis_db(2.4e9, r)).margin(1e-9));
    }
}

TEST_CASE("half-wave dipole gain", "[raytrace]")
{
    CHECK(dipole_gain(kPi / 2) == Approx(1.64).margin(1e-12));
    CHECK(dipole_gain(0.0) == 0.0);
    CHECK(dipole_gain(kPi) == 0.0);
    CHECK(dipole_gain(1e-9) < 1e-15);
    CHECK(dipole_gain(kPi / 4) == Approx(0.646652).margin(1e-6));
    CHECK(dipole_gain(kPi / 4) == Approx(0.6466).margin(1e-3));
    CHECK(vertical_dipole_gain_db({1, 0, 0}) == Approx(10 * std::log10(1.64)).margin(1e-12));
}

TEST_CASE("Fibonacci launch directions are unit and balanced", "[raytrace]")
{
    const auto dirs = fibonacci_sphere(10000);
    REQUIRE(dirs.size() == 10000);
    Vec3 mean;
    for (const Vec3 &d : dirs)
    {
        REQUIRE(d.norm() == Approx(1.0).margin(1e-9));
        mean += d;
    }
    CHECK((mean / 10000.0).norm() < 1e-3);
}

TEST_CASE("radio parameters are validated", "[raytrace]")
{
    RadioParams p;
    p.rx_positions = {{1, 1, 1}};
    CHECK_NOTHROW(p.validate());
    p.ray_count = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    p.ray_count = 10;
    p.max_bounces = -1;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("reference receivers form the centred 2 x 6 grid", "[raytrace]")
{
    const auto rx = paper_receivers();
    REQUIRE(rx.size() == 12);
    const double ys[] = {1.25, 3.75, 6.25, 8.75, 11.25, 13.75};
    for (std::size_t k = 0; k < 12; ++k)
    {
        CHECK(rx[k].x == (k % 2 == 0 ? 0.75 : 3.25));
        CHECK(rx[k].y == ys[k / 2]);
        CHECK(rx[k].z == 1.5);
    }
    CHECK(paper_radio(60e9).concrete_loss_db == 13.0);
    CHECK(paper_radio(2.4e9).concrete_loss_db == 7.0);
    CHECK(paper_radio(60e9).tx_power_dbm == 100.0);
}

TEST_CASE("empty scene yields the direct link budget", "[raytrace][oracle]")
{
    const Scene empty;
    const RadioParams p = radio_for({0, 0, 1.5}, {{10, 0, 1.5}}, 3);
    const PathSet paths = launch_rays(empty, EnvConfiguration::plain(0), p);
    REQUIRE(paths.size() == 1);
    REQUIRE(paths[0].size() == 1);
    const double expected = 100.0 - oracle::friis_db(60e9, 10.0) + 2 * 10 * std::log10(1.64);
    CHECK(expected == Approx(16.286).margin(1e-3));
    CHECK(paths[0][0].rx_power_dbm == Approx(expected).margin(0.5));
    CHECK(paths[0][0].rx_power_dbm == Approx(16.3).margin(0.5));
    CHECK(paths[0][0].bounce_count() == 0);
}

TEST_CASE("line of sight is blocked for NLOS receivers without bounces", "[raytrace]")
{
    const Scene s = build_paper_floorplan();
    RadioParams p = paper_radio(60e9);
    p.max_bounces = 0;
    const PathSet paths = launch_rays(s, EnvConfiguration::plain(s.tile_count()), p);
    int nlos = 0;
    for (std::size_t j = 0; j < p.rx_positions.size(); ++j)
    {
        const Vec3 d = p.rx_positions[j] - p.tx_position;
        const auto hit = ray_intersect(s, p.tx_position, d.normalized());
        if (hit && hit->distance < d.norm())
        {
            ++nlos;
            CHECK(paths[j].empty());
        }
    }
    CHECK(nlos == 12);
}

TEST_CASE("one-bounce mirror path matches the image method", "[raytrace][oracle]")
{
    const Scene s = mirror_scene();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ux(0.5, 5.0), uyz(-4.0, 4.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        const Vec3 tx{ux(rng), uyz(rng), uyz(rng)};
        const Vec3 rx{ux(rng), uyz(rng), uyz(rng)};
        const RadioParams p = radio_for(tx, {rx});
        const PathSet paths = launch_rays(s, EnvConfiguration::plain(s.tile_count()), p);
        const PropagationPath *bounce = path_with_bounces(paths[0], 1);
        REQUIRE(bounce);

        const oracle::ImagePath img = oracle::mirror_image_path(tx, rx, 60e9, 100.0);
        CHECK(bounce->unfolded_length == Approx(img.length).margin(0.01));
        CHECK(bounce->rx_power_dbm == Approx(img.power_dbm).margin(0.5));
        CHECK(distance(bounce->bounce_points[0].point, img.specular_point) < 0.1);
    }
}

TEST_CASE("steered reflections follow the virtual-normal mirror law", "[raytrace][oracle]")
{
    const Scene s = mirror_scene();
    const Vec3 tx{3.0, 0.4, 0.3};
    const Vec3 aim{0.0, 0.5, 0.5};
    for (int state = 0; state < 25; ++state)
    {
        const TileFunction f(state);
        const Tile &tile = s.tile(*s.tile_at(0, aim));
        const Vec3 vn = virtual_normal(tile, f.azimuth_deg(), f.elevation_deg());
        const Vec3 out = reflect_dir((aim - tx).normalized(), vn);
        REQUIRE(out.x > 0.0);
        const Vec3 rx = aim + 4.0 * out;
        const PathSet paths = launch_rays(s, EnvConfiguration::uniform(s.tile_count(), f), radio_for(tx, {rx}));
        const PropagationPath *bounce = path_with_bounces(paths[0], 1);
        REQUIRE(bounce);
        const Tile &hit = s.tile(*bounce->bounce_points[0].tile);
        const Vec3 expected = reflect_dir(bounce->departure, virtual_normal(hit, f.azimuth_deg(), f.elevation_deg()));
        CHECK(angle_between(bounce->arrival, expected) < 1e-6);
        if (state != TileFunction::kPlainIndex)
            CHECK(angle_between(bounce->arrival, reflect_dir(bounce->departure, hit.true_normal)) > deg2rad(10.0));
        CHECK(bounce->bounce_loss_db == 0.0);
    }
}

TEST_CASE("an absorbing tile costs exactly 35 dB", "[raytrace][oracle]")
{
    const Scene s = mirror_scene();
    const RadioParams p = radio_for({2.0, -1.0, 0.5}, {{3.0, 2.0, -0.5}});
    const PathSet steer = launch_rays(s, EnvConfiguration::plain(s.tile_count()), p);
    const PathSet absorb = launch_rays(s, EnvConfiguration::uniform(s.tile_count(), TileFunction::absorb()), p);
    const PropagationPath *a = path_with_bounces(steer[0], 1), *b = path_with_bounces(absorb[0], 1);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->rx_power_dbm - b->rx_power_dbm == Approx(35.0).margin(1e-9));
    CHECK(a->unfolded_length == b->unfolded_length);
    CHECK(path_with_bounces(steer[0], 0)->rx_power_dbm == path_with_bounces(absorb[0], 0)->rx_power_dbm);
}

TEST_CASE("concrete bounces cost the configured loss and flip the phase", "[raytrace]")
{
    Scene s;
    s.add_surface("slab", {-20, -20, 0}, {40, 0, 0}, {0, 40, 0}, Material::Concrete, {0, 0, 1});
    RadioParams p = radio_for({0, 0, 2}, {{3, 1, 1.5}});
    p.concrete_loss_db = 13.0;
    const PathSet paths = launch_rays(s, EnvConfiguration::plain(0), p);
    const PropagationPath *b = path_with_bounces(paths[0], 1);
    REQUIRE(b);
    CHECK(b->bounce_loss_db == 13.0);
    CHECK(b->phase == Approx(kPi));
    CHECK(path_with_bounces(paths[0], 0)->phase == 0.0);
}

TEST_CASE("path bookkeeping is self-consistent", "[raytrace][property]")
{
    const Scene s = build_paper_floorplan();
    RadioParams p = paper_radio(60e9);
    p.ray_count = 50000;
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> gene(0, 25);
    std::vector<int> genome(s.tile_count());
    for (int &g : genome)
        g = gene(rng);
    const PathSet paths = launch_rays(s, EnvConfiguration::from_genome(genome), p, 3);
    std::size_t total = 0;
    for (const auto &rx : paths)
        for (const PropagationPath &path : rx)
        {
            ++total;
            CHECK(std::abs(path.delay - path.unfolded_length / 299792458.0) < 1e-12);
            CHECK(path.rx_power_dbm <= p.tx_power_dbm);
            CHECK(path.bounce_loss_db >= 0.0);
            CHECK(path.bounce_count() <= 3);
            if (!path.disconnected)
            {
                const double expected = p.tx_power_dbm - friis_loss_db(p.frequency, path.unfolded_length) -
                                        path.bounce_loss_db + vertical_dipole_gain_db(path.departure) +
                                        vertical_dipole_gain_db(path.arrival);
                CHECK(path.rx_power_dbm == Approx(expected).margin(1e-9));
                CHECK(path.attenuation == Approx(std::pow(10.0, (path.rx_power_dbm - 100.0) / 20.0)).epsilon(1e-12));
            }
        }
    CHECK(total > 0);
}

TEST_CASE("plain configuration reflects specularly at every bounce", "[raytrace][property]")
{
    const Scene s = build_paper_floorplan();
    RadioParams p = paper_radio(60e9);
    p.ray_count = 50000;
    const PathSet paths = launch_rays(s, EnvConfiguration::plain(s.tile_count()), p);
    std::size_t bounces = 0;
    for (const auto &rx : paths)
        for (const PropagationPath &path : rx)
        {
            Vec3 dir = path.departure;
            for (std::size_t k = 0; k < path.bounce_count(); ++k)
            {
                const Hit &h = path.bounce_points[k];
                const Vec3 next = k + 1 < path.bounce_count()
                                      ? (path.bounce_points[k + 1].point - h.point).normalized()
                                      : path.arrival;
                const Vec3 mirror = reflect_dir(dir, s.surface(h.surface).true_normal);
                CHECK(angle_between(mirror, next) < 1e-6);
                dir = next;
                ++bounces;
            }
        }
    CHECK(bounces > 0);
}

TEST_CASE("absorbing tiles only ever lower path power", "[raytrace][property]")
{
    const Scene s = build_paper_floorplan();
    RadioParams p = paper_radio(60e9);
    p.ray_count = 50000;
    const PathSet plain = launch_rays(s, EnvConfiguration::plain(s.tile_count()), p);
    const PathSet absorb = launch_rays(s, EnvConfiguration::uniform(s.tile_count(), TileFunction::absorb()), p);
    REQUIRE(plain.size() == absorb.size());
    for (std::size_t j = 0; j < plain.size(); ++j)
    {
        REQUIRE(plain[j].size() == absorb[j].size());
        for (std::size_t k = 0; k < plain[j].size(); ++k)
        {
            const PropagationPath &a = plain[j][k], &b = absorb[j][k];
            REQUIRE(a.unfolded_length == b.unfolded_length);
            const auto tiles = std::count_if(a.bounce_points.begin(), a.bounce_points.end(),
                                             [](const Hit &h) { return h.tile.has_value(); });
            CHECK(a.rx_power_dbm - b.rx_power_dbm == Approx(35.0 * static_cast<double>(tiles)).margin(1e-9));
            CHECK(b.rx_power_dbm <= a.rx_power_dbm);
        }
    }
}

TEST_CASE("tracing is independent of the worker count", "[raytrace][property]")
{
    const Scene s = build_paper_floorplan();
    RadioParams p = paper_radio(2.4e9);
    p.ray_count = 40000;
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> gene(0, 25);
    std::vector<int> genome(s.tile_count());
    for (int &g : genome)
        g = gene(rng);
    const EnvConfiguration config = EnvConfiguration::from_genome(genome);
    p.workers = 1;
    const PathSet one = launch_rays(s, config, p, 5);
    p.workers = 4;
    const PathSet four = launch_rays(s, config, p, 5);
    require_same_paths(one, four);
    require_same_paths(one, launch_rays(s, config, p, 5));
}

TEST_CASE("configurations convert to and from genomes", "[raytrace]")
{
    const EnvConfiguration c = EnvConfiguration::uniform(5, TileFunction::absorb());
    CHECK(c.to_genome() == std::vector<int>(5, 25));
    CHECK(EnvConfiguration::from_genome({12, 12}) == EnvConfiguration::plain(2));
    CHECK_THROWS_AS(EnvConfiguration::from_genome({26}), Error);
}

TEST_CASE("path dumps are CSV with a header", "[raytrace][io]")
{
    const Scene empty;
    const PathSet paths = launch_rays(empty, EnvConfiguration::plain(0), radio_for({0, 0, 1.5}, {{10, 0, 1.5}}, 0));
    std::ostringstream out;
    write_paths_csv(out, paths);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "rx_index,bounces,length_m,delay_ns,power_dbm");
    INFO(row);
    REQUIRE(row.rfind("0,0,", 0) == 0);
    CHECK(std::stod(row.substr(4)) == Approx(10.0).margin(0.01));
}
