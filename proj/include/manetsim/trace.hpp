#pragma once

#include <functional>
#include <string>
#include <vector>

#include "manetsim/defense.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/time.hpp"

namespace manetsim {

/// Packet-level trace entry: one line per send/forward/receive/drop as seen
/// at the node that acted.
struct PacketTraceEvent {
    SimTime t;
    std::string event; // send | recv | fwd | drop
    std::string kind;  // RREQ | RREP | DATA | PROBE | PROBE-ACK | SUSPICION-ALERT
    NodeId from = 0;
    NodeId to = 0;     // next hop or final receiver; == from when n/a
    FlowId flow = 0;
    std::uint32_t seq = 0;
    RouteRecord route;
    std::string detail;
};

/// Defense trace entry: one line per completed route selection.
struct DefenseTraceEvent {
    SimTime t;
    NodeId origin = 0;
    std::uint32_t discovery = 0;
    std::vector<RouteCandidate> candidates;
    std::optional<RouteRecord> chosen;
    std::vector<RouteRecord> rejected;
    std::vector<NodeId> alerts; // suspects alerted during this selection
};

/// Observer hooks for a world. Null functions cost nothing on the hot path.
struct TraceHooks {
    std::function<void(const PacketTraceEvent&)> packet;
    std::function<void(const DefenseTraceEvent&)> defense;
};

} // namespace manetsim
