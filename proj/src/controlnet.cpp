// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#include "hypersim/controlnet.hpp"

#include "hypersim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

namespace hypersim
{

std::string to_string(PacketKind kind)
{
    switch (kind)
    {
    case PacketKind::SetConfig:
        return "SetConfig";
    case PacketKind::Ack:
        return "Ack";
    case PacketKind::Error:
        return "Error";
    case PacketKind::MonitorRequest:
        return "MonitorRequest";
    case PacketKind::MonitorData:
        return "MonitorData";
    case PacketKind::FaultNotice:
        return "FaultNotice";
    }
    return "?";
}

namespace
{

constexpr int kUnreachable = std::numeric_limits<int>::max();

std::vector<ControllerNode> controller_grid(int m)
{
    std::vector<ControllerNode> nodes;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            nodes.push_back({i, j, ControllerState::Idle, 0});
    return nodes;
}

void link(std::vector<TileGateway> &gws, TileId a, TileId b)
{
    auto &na = gws[static_cast<std::size_t>(a)].neighbors;
    if (std::find(na.begin(), na.end(), b) != na.end())
        return;
    na.push_back(b);
    gws[static_cast<std::size_t>(b)].neighbors.push_back(a);
}

} // namespace

Network Network::from_scene(const Scene &scene, std::vector<TileId> entry_points, int controllers_per_side)
{
    Network net;
    net.controllers_per_side_ = controllers_per_side;
    net.geometry_ = scene.tiles();
    for (const Tile &t : scene.tiles())
        net.gateways_.push_back({t.id, t.row, t.col, {}, false, TileFunction::plain(), controller_grid(controllers_per_side)});

    const auto &tiles = scene.tiles();
    for (std::size_t a = 0; a < tiles.size(); ++a)
        for (std::size_t b = a + 1; b < tiles.size(); ++b)
        {
            const Tile &ta = tiles[a], &tb = tiles[b];
            bool adjacent;
            if (ta.parent_surface == tb.parent_surface)
                adjacent = std::abs(ta.row - tb.row) + std::abs(ta.col - tb.col) == 1;
            else
                // Seam between two faces: same course of tiles, centres closer
                // than any two tiles of one face.
                adjacent = ta.row == tb.row && std::abs(ta.center.z - tb.center.z) < 1e-9 &&
                           distance(ta.center, tb.center) < 0.75 * ta.side;
            if (adjacent)
                link(net.gateways_, ta.id, tb.id);
        }
    for (auto &gw : net.gateways_)
        std::sort(gw.neighbors.begin(), gw.neighbors.end());

    for (TileId e : entry_points)
    {
        net.check_address(e);
        net.gateways_[static_cast<std::size_t>(e)].is_entry_point = true;
    }
    if (entry_points.empty())
        throw Error("a tile network needs at least one entry point");
    net.entries_ = std::move(entry_points);
    std::sort(net.entries_.begin(), net.entries_.end());
    return net;
}

Network Network::grid(int rows, int cols, std::vector<TileId> entry_points, int controllers_per_side)
{
    if (rows < 1 || cols < 1)
        throw Error("grid network needs at least one row and column");
    Scene flat;
    flat.add_surface("grid", {0, 0, 0}, {static_cast<double>(cols), 0, 0}, {0, static_cast<double>(rows), 0},
                     Material::TiledWall, {0, 0, 1});
    return from_scene(flat, std::move(entry_points), controllers_per_side);
}

const TileGateway &Network::gateway(TileId id) const
{
    check_address(id);
    return gateways_[static_cast<std::size_t>(id)];
}

void Network::check_address(TileId id) const
{
    if (id < 0 || static_cast<std::size_t>(id) >= gateways_.size())
        throw AddressingError("unknown tile id " + std::to_string(id));
}

void Network::attach_lookup(LookupTable table, double wavelength)
{
    lookup_ = std::move(table);
    lookup_wavelength_ = wavelength;
}

void Network::fail_tile(TileId id)
{
    fail_controller(id, 0, 0);
}

void Network::fail_controller(TileId id, int i, int j)
{
    check_address(id);
    TileGateway &gw = gateways_[static_cast<std::size_t>(id)];
    if (i < 0 || j < 0 || i >= controllers_per_side_ || j >= controllers_per_side_)
        throw AddressingError("controller (" + std::to_string(i) + "," + std::to_string(j) + ") outside the tile");
    gw.controllers[static_cast<std::size_t>(i * controllers_per_side_ + j)].state = ControllerState::Failed;
    // Fault detection: a tile that can still talk reports the failure.
    if (gw.live())
        if (const auto trace = from_server(id))
        {
            DeliveryTrace back = *trace;
            std::reverse(back.hops.begin(), back.hops.end());
            record(back, PacketKind::FaultNotice, id, kServer, clock_);
            clock_ += back.hop_count() + 1;
        }
}

std::vector<TileId> Network::inject_failures(double fraction, std::uint64_t seed)
{
    if (fraction < 0.0 || fraction > 1.0)
        throw Error("failure fraction must lie in [0, 1]");
    std::vector<TileId> ids(gateways_.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(static_cast<std::size_t>(std::lround(fraction * static_cast<double>(gateways_.size()))));
    std::sort(ids.begin(), ids.end());
    for (TileId id : ids)
        gateways_[static_cast<std::size_t>(id)].controllers.front().state = ControllerState::Failed;
    return ids;
}

std::vector<int> Network::distances_to(TileId dest) const
{
    std::vector<int> dist(gateways_.size(), kUnreachable);
    if (!gateways_[static_cast<std::size_t>(dest)].live())
        return dist;
    std::deque<TileId> queue{dest};
    dist[static_cast<std::size_t>(dest)] = 0;
    while (!queue.empty())
    {
        const TileId cur = queue.front();
        queue.pop_front();
        for (TileId n : gateways_[static_cast<std::size_t>(cur)].neighbors)
        {
            auto &d = dist[static_cast<std::size_t>(n)];
            if (d == kUnreachable && gateways_[static_cast<std::size_t>(n)].live())
            {
                d = dist[static_cast<std::size_t>(cur)] + 1;
                queue.push_back(n);
            }
        }
    }
    return dist;
}

namespace
{

DeliveryTrace walk(const std::vector<TileGateway> &gws, const std::vector<int> &dist, TileId from, TileId to)
{
    DeliveryTrace trace;
    TileId cur = from;
    trace.hops.push_back(cur);
    while (cur != to)
    {
        const TileGateway &here = gws[static_cast<std::size_t>(cur)];
        const int want = dist[static_cast<std::size_t>(cur)] - 1;
        TileId next = -1;
        for (TileId n : here.neighbors) // sorted ascending
        {
            if (dist[static_cast<std::size_t>(n)] != want)
                continue;
            const bool row_move = gws[static_cast<std::size_t>(n)].row != here.row;
            if (next < 0 || (row_move && gws[static_cast<std::size_t>(next)].row == here.row))
                next = n;
        }
        cur = next;
        trace.hops.push_back(cur);
    }
    return trace;
}

} // namespace

std::optional<DeliveryTrace> Network::path_between(TileId from, TileId to) const
{
    if (!gateways_[static_cast<std::size_t>(from)].live())
        return std::nullopt;
    const auto dist = distances_to(to);
    if (dist[static_cast<std::size_t>(from)] == kUnreachable)
        return std::nullopt;
    return walk(gateways_, dist, from, to);
}

std::optional<DeliveryTrace> Network::from_server(TileId to) const
{
    const auto dist = distances_to(to);
    TileId entry = -1;
    for (TileId e : entries_)
        if (dist[static_cast<std::size_t>(e)] != kUnreachable &&
            (entry < 0 || dist[static_cast<std::size_t>(e)] < dist[static_cast<std::size_t>(entry)]))
            entry = e;
    if (entry < 0)
        return std::nullopt;
    return walk(gateways_, dist, entry, to);
}

DeliveryTrace Network::route(const CommandPacket &packet) const
{
    check_address(packet.dest);
    std::optional<DeliveryTrace> trace;
    if (packet.src == kServer)
        trace = from_server(packet.dest);
    else
    {
        check_address(packet.src);
        trace = path_between(packet.src, packet.dest);
    }
    if (!trace)
        throw DeliveryError("no live path to tile " + std::to_string(packet.dest));
    if (trace->hop_count() + packet.hop_count > static_cast<int>(gateways_.size()))
        throw DeliveryError("hop budget exceeded for tile " + std::to_string(packet.dest));
    return *trace;
}

void Network::record(const DeliveryTrace &trace, PacketKind kind, int src, int dst, int start_tick)
{
    // Server links sit outside the tile network: one tick each, no hop.
    if (src == kServer)
        log_.push_back({start_tick, kind, src, dst, kServer, trace.hops.front()});
    const int offset = src == kServer ? 1 : 0;
    for (std::size_t k = 0; k + 1 < trace.hops.size(); ++k)
        log_.push_back({start_tick + offset + static_cast<int>(k), kind, src, dst, trace.hops[k], trace.hops[k + 1]});
    if (dst == kServer)
        log_.push_back({start_tick + offset + trace.hop_count(), kind, src, dst, trace.hops.back(), kServer});
}

void Network::apply(TileGateway &gw, TileFunction f)
{
    gw.function = f;
    if (!lookup_)
        return;
    const auto catalog = tile_catalog(lookup_wavelength_);
    const LookupEntry *entry = lookup_->find(function_key(catalog[static_cast<std::size_t>(f.index())]));
    if (!entry || entry->best.size() != controllers_per_side_)
        return;
    for (ControllerNode &c : gw.controllers)
        if (c.state != ControllerState::Failed)
            c.switch_state = entry->best.at(c.i, c.j);
}

DeployOutcome Network::deploy(TileId tile, FunctionKind action, const EMFunction &parameters)
{
    check_address(tile);
    if (action == FunctionKind::Steer && !parameters.out_dir)
        throw ParameterError("STEER requires an intended reflection direction");
    if (action == FunctionKind::Absorb && parameters.out_dir)
        throw ParameterError("ABSORB takes no reflection direction");
    EMFunction request = parameters;
    request.kind = action;
    const TileFunction f = quantize_function(request, geometry_[static_cast<std::size_t>(tile)]);

    const auto trace = from_server(tile);
    if (!trace)
        throw DeliveryError("tile " + std::to_string(tile) + " is unreachable");

    const int hops = trace->hop_count();
    record(*trace, PacketKind::SetConfig, kServer, tile, clock_);
    apply(gateways_[static_cast<std::size_t>(tile)], f);
    DeliveryTrace back = *trace;
    std::reverse(back.hops.begin(), back.hops.end());
    record(back, PacketKind::Ack, tile, kServer, clock_ + hops + 1);
    clock_ += 2 * hops + 2;
    return {PacketKind::Ack, f, 2 * hops};
}

BroadcastReport Network::broadcast_config(const EnvConfiguration &config)
{
    if (config.states.size() != gateways_.size())
        throw Error("configuration length does not match the tile count");
    BroadcastReport report;
    const int start = clock_;
    const std::size_t first_event = log_.size();
    int done = start;
    for (std::size_t t = 0; t < gateways_.size(); ++t)
    {
        const auto id = static_cast<TileId>(t);
        const auto trace = from_server(id);
        if (!trace)
        {
            ++report.failed;
            report.unreachable.push_back(id);
            continue;
        }
        const int hops = trace->hop_count();
        record(*trace, PacketKind::SetConfig, kServer, id, start);
        ++report.delivered;
        apply(gateways_[t], config.states[t]);
        DeliveryTrace back = *trace;
        std::reverse(back.hops.begin(), back.hops.end());
        record(back, PacketKind::Ack, id, kServer, start + hops + 1);
        ++report.acked;
        report.hop_volume += static_cast<std::size_t>(2 * hops);
        done = std::max(done, start + 2 * hops + 2);
    }
    std::stable_sort(log_.begin() + static_cast<std::ptrdiff_t>(first_event), log_.end(),
                     [](const LogEvent &a, const LogEvent &b) { return a.tick < b.tick; });
    clock_ = done;
    report.completion_tick = done - start;
    return report;
}

MonitorData Network::monitor(TileId tile)
{
    check_address(tile);
    const auto trace = from_server(tile);
    if (!trace)
        throw DeliveryError("tile " + std::to_string(tile) + " is unreachable");
    const int hops = trace->hop_count();
    record(*trace, PacketKind::MonitorRequest, kServer, tile, clock_);
    DeliveryTrace back = *trace;
    std::reverse(back.hops.begin(), back.hops.end());
    record(back, PacketKind::MonitorData, tile, kServer, clock_ + hops + 1);
    clock_ += 2 * hops + 2;

    const TileGateway &gw = gateways_[static_cast<std::size_t>(tile)];
    MonitorData data{tile, gw.function, {}, 2 * hops};
    for (const ControllerNode &c : gw.controllers)
        if (c.state == ControllerState::Failed)
            data.faulty_controllers.emplace_back(c.i, c.j);
    return data;
}

EnvConfiguration Network::configuration() const
{
    EnvConfiguration c;
    for (const TileGateway &gw : gateways_)
        c.states.push_back(gw.function);
    return c;
}

void Network::write_log(std::ostream &out) const
{
    auto name = [](int v) { return v == kServer ? std::string("server") : std::to_string(v); };
    out << "# tick kind src dst hop_from hop_to\n";
    for (const LogEvent &e : log_)
        out << e.tick << ' ' << to_string(e.kind) << ' ' << name(e.src) << ' ' << name(e.dst) << ' '
            << name(e.hop_from) << ' ' << name(e.hop_to) << '\n';
}

} // namespace hypersim
