// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Packet-level model of the tile control plane.
//
// Tile gateways form a wired grid; one or more gateways are entry points to
// the configuration server. Packets advance one hop per tick. Forwarding
// picks, at every gateway, a live neighbour on a shortest live path to the
// destination, preferring a row move before a column move, so an
// unobstructed grid yields dimension-ordered routes and failures are routed
// around whenever a live path exists.
//
// Inside a tile an M x M controller grid owns the switch states. The gateway
// is attached to controller (0,0); if that controller fails the tile is cut
// off and stops relaying.

#pragma once

#include "hypersim/emfunc.hpp"
#include "hypersim/raytrace.hpp"
#include "hypersim/scene.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hypersim
{

enum class ControllerState
{
    Idle,
    Relaying,
    Failed,
};

struct ControllerNode
{
    int i = 0;
    int j = 0;
    ControllerState state = ControllerState::Idle;
    std::uint8_t switch_state = 0;
};

struct TileGateway
{
    TileId tile_id = 0;
    int row = 0;
    int col = 0;
    std::vector<TileId> neighbors;
    bool is_entry_point = false;
    TileFunction function = TileFunction::plain();
    std::vector<ControllerNode> controllers; // row-major, M x M

    bool live() const { return controllers.empty() || controllers.front().state != ControllerState::Failed; }
};

enum class PacketKind
{
    SetConfig,
    Ack,
    Error,
    MonitorRequest,
    MonitorData,
    FaultNotice,
};

std::string to_string(PacketKind kind);

/// Source -1 denotes the configuration server.
inline constexpr int kServer = -1;

struct CommandPacket
{
    PacketKind kind = PacketKind::SetConfig;
    int src = kServer;
    TileId dest = 0;
    std::optional<TileFunction> function;
    std::optional<SwitchMatrix> switches;
    std::string report;
    int hop_count = 0;
};

struct DeliveryTrace
{
    std::vector<TileId> hops; // gateways visited, first is where the packet entered the tile network
    int hop_count() const { return hops.empty() ? 0 : static_cast<int>(hops.size()) - 1; }
};

struct LogEvent
{
    int tick = 0;
    PacketKind kind = PacketKind::SetConfig;
    int src = kServer;
    int dst = 0;
    int hop_from = 0;
    int hop_to = 0;
};

struct DeployOutcome
{
    PacketKind reply = PacketKind::Ack;
    TileFunction applied;
    int hops = 0; // request plus reply
};

struct BroadcastReport
{
    std::size_t delivered = 0;
    std::size_t acked = 0;
    std::size_t failed = 0;
    std::size_t hop_volume = 0; // inter-gateway hops of all requests and replies
    int completion_tick = 0;
    std::vector<TileId> unreachable;
};

struct MonitorData
{
    TileId tile = 0;
    TileFunction function;
    std::vector<std::pair<int, int>> faulty_controllers;
    int hops = 0;
};

class Network
{
  public:
    /// Gateways for every tile of the scene; tiles sharing an edge (or
    /// meeting at a corner seam between faces) are linked.
    static Network from_scene(const Scene &scene, std::vector<TileId> entry_points = {0},
                              int controllers_per_side = 4);

    /// Bare rows x cols grid; tile id = row * cols + col.
    static Network grid(int rows, int cols, std::vector<TileId> entry_points = {0}, int controllers_per_side = 2);

    std::size_t size() const { return gateways_.size(); }
    const TileGateway &gateway(TileId id) const;
    const std::vector<TileId> &entry_points() const { return entries_; }

    /// Switch configurations attached to SetConfig packets, keyed like
    /// tile_catalog(wavelength).
    void attach_lookup(LookupTable table, double wavelength);

    void fail_tile(TileId id);
    void fail_controller(TileId id, int i, int j);
    /// Fails the gateway controller of round(fraction * size) distinct tiles.
    std::vector<TileId> inject_failures(double fraction, std::uint64_t seed);

    /// Route of a packet. Source kServer enters through the nearest live
    /// entry point (ties: lowest id). Throws DeliveryError without a live path.
    DeliveryTrace route(const CommandPacket &packet) const;

    DeployOutcome deploy(TileId tile, FunctionKind action, const EMFunction &parameters);
    BroadcastReport broadcast_config(const EnvConfiguration &config);
    MonitorData monitor(TileId tile);

    /// Current tile functions, consumable by the ray tracer.
    EnvConfiguration configuration() const;

    const std::vector<LogEvent> &log() const { return log_; }
    void write_log(std::ostream &out) const;

  private:
    Network() = default;
    void check_address(TileId id) const;
    std::vector<int> distances_to(TileId dest) const;
    std::optional<DeliveryTrace> path_between(TileId from, TileId to) const;
    std::optional<DeliveryTrace> from_server(TileId to) const;
    void record(const DeliveryTrace &trace, PacketKind kind, int src, int dst, int start_tick);
    void apply(TileGateway &gw, TileFunction f);

    std::vector<TileGateway> gateways_;
    std::vector<Tile> geometry_;
    std::vector<TileId> entries_;
    int controllers_per_side_ = 1;
    std::optional<LookupTable> lookup_;
    double lookup_wavelength_ = 0.0;
    std::vector<LogEvent> log_;
    int clock_ = 0;
};

} // namespace hypersim
