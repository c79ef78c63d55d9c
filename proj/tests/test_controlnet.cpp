// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#include "hypersim/controlnet.hpp"
#include "hypersim/errors.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <queue>
#include <random>
#include <set>
#include <sstream>

using namespace hypersim;

namespace
{

constexpr double kLambda = 299792458.0 / 60e9;

EMFunction absorb_request()
{
    return {FunctionKind::Absorb, {-1, 0, 0}, std::nullopt, kLambda};
}

CommandPacket packet(int src, TileId dest)
{
    CommandPacket p;
    p.src = src;
    p.dest = dest;
    return p;
}

} // namespace

TEST_CASE("grid neighbours follow rows and columns", "[controlnet]")
{
    const Network net = Network::grid(3, 4);
    REQUIRE(net.size() == 12);
    CHECK(net.gateway(0).neighbors == std::vector<TileId>{1, 4});
    CHECK(net.gateway(5).neighbors == std::vector<TileId>{1, 4, 6, 9});
    CHECK(net.gateway(5).row == 1);
    CHECK(net.gateway(5).col == 1);
    CHECK(net.gateway(0).is_entry_point);
}

TEST_CASE("reference network links every tile into one seamless grid", "[controlnet]")
{
    const Scene s = build_paper_floorplan();
    const Network net = Network::from_scene(s);
    REQUIRE(net.size() == 222);
    std::size_t degree_sum = 0;
    for (std::size_t t = 0; t < net.size(); ++t)
    {
        const auto &n = net.gateway(static_cast<TileId>(t)).neighbors;
        CHECK(n.size() >= 2);
        CHECK(n.size() <= 5);
        degree_sum += n.size();
        for (TileId o : n)
        {
            const auto &back = net.gateway(o).neighbors;
            CHECK(std::find(back.begin(), back.end(), static_cast<TileId>(t)) != back.end());
            CHECK(distance(s.tile(o).center, s.tile(static_cast<TileId>(t)).center) <= 1.0 + 1e-9);
        }
    }
    CHECK(oracle::reachable(net).size() == 222);
    CHECK(degree_sum % 2 == 0);
}

TEST_CASE("corner to corner on a 2 x 2 grid takes two hops", "[controlnet]")
{
    const Network net = Network::grid(2, 2);
    const DeliveryTrace t = net.route(packet(0, 3));
    CHECK(t.hop_count() == 2);
    CHECK(t.hops == std::vector<TileId>{0, 2, 3});
}

TEST_CASE("routes detour around a failed centre", "[controlnet]")
{
    Network net = Network::grid(3, 3);
    CHECK(net.route(packet(0, 8)).hops == std::vector<TileId>{0, 3, 6, 7, 8});
    net.fail_tile(4);
    const DeliveryTrace t = net.route(packet(0, 8));
    CHECK(t.hop_count() == 4);
    CHECK(std::find(t.hops.begin(), t.hops.end(), 4) == t.hops.end());
}

TEST_CASE("a failed middle row disconnects the grid", "[controlnet]")
{
    Network net = Network::grid(3, 3);
    for (TileId t : {3, 4, 5})
        net.fail_tile(t);
    CHECK_THROWS_AS(net.route(packet(0, 7)), DeliveryError);
    CHECK_THROWS_AS(net.route(packet(kServer, 8)), DeliveryError);
    CHECK(net.route(packet(0, 2)).hop_count() == 2);
}

TEST_CASE("routing agrees with graph reachability", "[controlnet][oracle]")
{
    const Scene s = build_paper_floorplan();
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        Network net = Network::from_scene(s);
        net.inject_failures(0.15, seed);
        const auto live = oracle::reachable(net);
        for (TileId t = 0; t < static_cast<TileId>(net.size()); ++t)
        {
            bool ok = true;
            try
            {
                const DeliveryTrace tr = net.route(packet(kServer, t));
                for (TileId h : tr.hops)
                    CHECK(net.gateway(h).live());
            }
            catch (const DeliveryError &)
            {
                ok = false;
            }
            CHECK(ok == (live.count(t) == 1));
        }
    }
}

TEST_CASE("deploy applies absorb and acknowledges", "[controlnet]")
{
    Network net = Network::from_scene(build_paper_floorplan());
    const DeployOutcome out = net.deploy(17, FunctionKind::Absorb, absorb_request());
    CHECK(out.reply == PacketKind::Ack);
    CHECK(net.gateway(17).function == TileFunction::absorb());
    CHECK(net.configuration().states[17] == TileFunction::absorb());
    const DeployOutcome again = net.deploy(17, FunctionKind::Absorb, absorb_request());
    CHECK(again.reply == PacketKind::Ack);
    CHECK(net.gateway(17).function == TileFunction::absorb());
}

TEST_CASE("deploy quantises steering requests", "[controlnet]")
{
    const Scene s = build_paper_floorplan();
    Network net = Network::from_scene(s);
    const Tile &t = s.tile(40);
    const Vec3 in = (-1.0 * t.true_normal + 0.2 * t.axis_u).normalized();
    const Vec3 out = reflect_dir(in, virtual_normal(t, 15, -15));
    const EMFunction req{FunctionKind::Steer, in, out, kLambda};
    const DeployOutcome o = net.deploy(40, FunctionKind::Steer, req);
    CHECK(o.applied == TileFunction::steer(15, -15));
    CHECK(o.applied == quantize_function(req, t));
    CHECK(net.gateway(40).function == o.applied);
}

TEST_CASE("deploy validates its request", "[controlnet]")
{
    Network net = Network::from_scene(build_paper_floorplan());
    const EMFunction no_out{FunctionKind::Steer, {-1, 0, 0}, std::nullopt, kLambda};
    CHECK_THROWS_AS(net.deploy(17, FunctionKind::Steer, no_out), ParameterError);
    CHECK_THROWS_AS(net.deploy(9999, FunctionKind::Absorb, absorb_request()), AddressingError);
    CHECK_THROWS_AS(net.deploy(-1, FunctionKind::Absorb, absorb_request()), AddressingError);
    net.fail_tile(17);
    CHECK_THROWS_AS(net.deploy(17, FunctionKind::Absorb, absorb_request()), DeliveryError);
}

TEST_CASE("full broadcast reaches every tile", "[controlnet]")
{
    const Scene s = build_paper_floorplan();
    Network net = Network::from_scene(s);
    const EnvConfiguration config = EnvConfiguration::uniform(s.tile_count(), TileFunction::steer(-30, 15));
    const BroadcastReport r = net.broadcast_config(config);
    CHECK(r.delivered == 222);
    CHECK(r.acked == 222);
    CHECK(r.failed == 0);
    CHECK(r.unreachable.empty());
    CHECK(net.configuration() == config);
    CHECK(r.hop_volume > 0);
    CHECK_THROWS_AS(net.broadcast_config(EnvConfiguration::plain(3)), Error);
}

TEST_CASE("broadcast under failures delivers exactly the reachable tiles", "[controlnet][oracle]")
{
    const Scene s = build_paper_floorplan();
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        Network net = Network::from_scene(s);
        const auto failed = net.inject_failures(0.05, seed);
        CHECK(failed.size() == 11);
        const auto live = oracle::reachable(net);
        const BroadcastReport r = net.broadcast_config(EnvConfiguration::uniform(222, TileFunction::absorb()));
        CHECK(r.delivered == live.size());
        CHECK(r.acked == r.delivered);
        CHECK(r.failed == 222 - live.size());
        for (TileId t : r.unreachable)
            CHECK(live.count(t) == 0);
        for (TileId t : live)
            CHECK(net.gateway(t).function == TileFunction::absorb());
    }
}

TEST_CASE("a second entry point never costs more hops", "[controlnet]")
{
    const Scene s = build_paper_floorplan();
    Network one = Network::from_scene(s, {0});
    Network two = Network::from_scene(s, {0, 150});
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> gene(0, 25);
    std::vector<int> genome(222);
    for (int &g : genome)
        g = gene(rng);
    const EnvConfiguration config = EnvConfiguration::from_genome(genome);
    const BroadcastReport a = one.broadcast_config(config);
    const BroadcastReport b = two.broadcast_config(config);
    CHECK(one.configuration() == two.configuration());
    CHECK(b.hop_volume <= a.hop_volume);
    CHECK(b.hop_volume < a.hop_volume);
}

TEST_CASE("broadcast then trace equals tracing the configuration directly", "[controlnet]")
{
    const Scene s = build_paper_floorplan();
    Network net = Network::from_scene(s);
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> gene(0, 25);
    std::vector<int> genome(222);
    for (int &g : genome)
        g = gene(rng);
    const EnvConfiguration config = EnvConfiguration::from_genome(genome);
    net.broadcast_config(config);
    RadioParams p = paper_radio(60e9);
    p.ray_count = 20000;
    const PathSet direct = launch_rays(s, config, p);
    const PathSet via = launch_rays(s, net.configuration(), p);
    REQUIRE(direct.size() == via.size());
    for (std::size_t j = 0; j < direct.size(); ++j)
    {
        REQUIRE(direct[j].size() == via[j].size());
        for (std::size_t k = 0; k < direct[j].size(); ++k)
            CHECK(direct[j][k].rx_power_dbm == via[j][k].rx_power_dbm);
    }
}

TEST_CASE("monitoring reads back state and faults", "[controlnet]")
{
    Network net = Network::from_scene(build_paper_floorplan());
    net.deploy(30, FunctionKind::Absorb, absorb_request());
    CHECK(net.monitor(30).function == TileFunction::absorb());
    CHECK(net.monitor(30).faulty_controllers.empty());
    net.fail_controller(30, 2, 3);
    const MonitorData d = net.monitor(30);
    CHECK(d.faulty_controllers == std::vector<std::pair<int, int>>{{2, 3}});
    CHECK(net.deploy(30, FunctionKind::Absorb, absorb_request()).reply == PacketKind::Ack);
    CHECK_THROWS_AS(net.fail_controller(30, 4, 0), AddressingError);
    net.fail_tile(31);
    CHECK_THROWS_AS(net.monitor(31), DeliveryError);
}

TEST_CASE("controller faults raise a notice to the server", "[controlnet]")
{
    Network net = Network::grid(2, 2);
    net.fail_controller(3, 1, 1);
    const auto &log = net.log();
    REQUIRE_FALSE(log.empty());
    CHECK(log.back().kind == PacketKind::FaultNotice);
    CHECK(log.back().hop_to == kServer);
    const std::size_t before = net.log().size();
    net.fail_tile(2);
    CHECK(net.log().size() == before);
}

TEST_CASE("deployed functions program the switch matrix", "[controlnet]")
{
    Network net = Network::grid(2, 2, {0}, 2);
    const LookupTable table = populate_lookup(tile_catalog(kLambda), 2, SearchMethod::Exhaustive);
    net.attach_lookup(table, kLambda);
    net.deploy(3, FunctionKind::Absorb, {FunctionKind::Absorb, {0, 0, -1}, std::nullopt, kLambda});
    const SwitchMatrix &best =
        table.at(function_key(tile_catalog(kLambda)[static_cast<std::size_t>(TileFunction::kAbsorbIndex)])).best;
    for (const ControllerNode &c : net.gateway(3).controllers)
        CHECK(c.switch_state == best.at(c.i, c.j));
}

TEST_CASE("packet log is hop-synchronous", "[controlnet][io]")
{
    Network net = Network::grid(1, 4);
    net.deploy(3, FunctionKind::Absorb, absorb_request());
    const auto &log = net.log();
    // Server link, three hops out, three hops back, server link.
    REQUIRE(log.size() == 8);
    for (std::size_t k = 0; k < log.size(); ++k)
        CHECK(log[k].tick == static_cast<int>(k));
    CHECK(log.front().kind == PacketKind::SetConfig);
    CHECK(log.back().kind == PacketKind::Ack);
    std::ostringstream out;
    net.write_log(out);
    CHECK(out.str().find("0 SetConfig server 3 server 0\n") != std::string::npos);
    CHECK(out.str().find("7 Ack 3 server 0 server\n") != std::string::npos);
}
