#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "manetsim/ais.hpp"
#include "manetsim/defense.hpp"
#include "manetsim/engine.hpp"
#include "manetsim/link.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/scenario.hpp"
#include "manetsim/trace.hpp"

namespace manetsim {

enum class Role : std::uint8_t { Honest, Blackhole };

/// Cached source routes, newest last, keyed by destination. Routes are
/// invalidated when a forwarding failure is observed on one of their links.
class RouteCache {
public:
    void add(NodeId dest, const RouteRecord& route, SimTime now);
    const RouteRecord* best(NodeId dest) const;
    bool has(NodeId dest) const { return best(dest) != nullptr; }
    /// Remove every cached route using the directed link a -> b.
    void invalidate_link(NodeId a, NodeId b);
    std::size_t size(NodeId dest) const;

private:
    struct Cached {
        RouteRecord route;
        SimTime inserted;
    };
    std::map<NodeId, std::vector<Cached>> routes_;
};

struct SinkCounter {
    std::uint64_t data = 0;
    std::uint64_t probes = 0;
    std::uint64_t total() const { return data + probes; }
};

/// Shared services a node needs from its world.
struct NodeEnv {
    Engine& engine;
    Radio& radio;
    MetricsLedger& ledger;
    RngStream& ais_rng;
    const ScenarioConfig& config;
    TraceHooks& trace;
    /// Modeled route-error feedback: invalidate the broken link at a remote
    /// node's cache without sending an explicit packet.
    std::function<void(NodeId owner, NodeId link_a, NodeId link_b)> invalidate_remote;
};

/// One protocol participant. Honest nodes run DSR (and optionally the
/// defended route selection); black holes forge replies and sink traffic.
class Node {
public:
    Node(NodeId id, Role role, bool defended, NodeEnv env);

    NodeId id() const { return id_; }
    Role role() const { return role_; }
    bool defended() const { return defended_; }

    /// Entry point for every packet the radio delivers to this node.
    void receive(NodeId from, const Packet& packet);

    /// Application-level send. Uses a cached route or buffers the packet and
    /// opens a discovery.
    void send_data(FlowId flow, std::uint32_t seq, NodeId dest, std::uint32_t payload_bytes);

    /// Flood an RREQ for `target`. Coalesces with an already-pending
    /// discovery. Returns the request id in flight.
    std::uint32_t start_discovery(NodeId target);

    /// Invalidate any cached route using the directed link a -> b.
    void invalidate_link(NodeId a, NodeId b);

    /// Report packets still buffered when the run ends.
    void mark_end_buffered();

    // introspection (tests, report)
    const RouteCache& cache() const { return cache_; }
    const SinkCounter& sink_counter() const { return sink_; }
    const SuspicionTable& suspicion() const { return suspicion_; }
    std::size_t buffered_packets() const { return buffer_.size(); }
    bool discovery_pending(NodeId target) const { return pending_.count(target) > 0; }
    const std::vector<std::pair<NodeId, SimTime>>& rrep_log() const { return rrep_log_; }
    const DetectorSet* detectors() const { return detectors_trained_ ? &detectors_ : nullptr; }

private:
    struct CandidateState {
        RouteCandidate info;
        std::uint64_t active_probe = 0; // probe_id awaiting ack/timeout, 0 = none
        int probes_sent = 0;
        bool done() const { return info.probe_successes + info.probe_failures >= kProbeCount; }
    };

    struct Discovery {
        std::uint32_t request_id = 0;
        int retries_left = 0;
        SimTime started;
        bool window_open = false;   // defended mode: collection window running
        bool probing = false;
        std::vector<CandidateState> candidates;
    };

    struct BufferedPacket {
        NodeId dest;
        DataPacket packet;
    };

    // receive dispatch
    void handle_rreq(NodeId from, Rreq rreq);
    void handle_rrep(NodeId from, Rrep rrep);
    void handle_data(NodeId from, DataPacket pkt);
    void handle_probe(NodeId from, Probe probe);
    void handle_probe_ack(NodeId from, ProbeAck ack);
    void handle_alert(NodeId from, SuspicionAlert alert);

    // dsr mechanics
    void flood_rreq(NodeId target, Discovery& d);
    void reply_as_destination(const Rreq& rreq);
    bool reply_from_cache(const Rreq& rreq);
    void send_rrep(Rrep rrep);
    void adopt_route(NodeId target, const RouteRecord& route);
    void flush_buffer(NodeId target);
    void fail_discovery(NodeId target);
    void on_discovery_timeout(NodeId target, std::uint32_t request_id);
    void transmit_data(DataPacket pkt);

    // adversary
    void forge_rrep(const Rreq& rreq);
    void sink_packet(const Packet& packet);

    // defense pipeline
    void on_rrep_defended(const Rrep& rrep);
    void on_collection_closed(NodeId target, std::uint32_t request_id);
    void issue_probe(NodeId target, std::uint32_t request_id, std::size_t cand_idx);
    void on_probe_timeout(std::uint64_t probe_id);
    void probe_resolved(NodeId target, std::uint32_t request_id, std::size_t cand_idx, bool success);
    void finish_selection(NodeId target, Discovery& d);
    void raise_alert_and_isolate(NodeId suspect);
    void harvest_self_pattern(const FeatureVec& pattern);
    bool route_blocked(const RouteRecord& route) const;

    void trace_packet(const char* event, const Packet& packet, NodeId to, const char* detail = "");

    NodeId id_;
    Role role_;
    bool defended_;
    NodeEnv env_;

    RouteCache cache_;
    std::set<std::pair<NodeId, std::uint32_t>> seen_rreqs_;
    std::uint32_t next_request_id_ = 1;
    std::map<NodeId, Discovery> pending_;
    std::deque<BufferedPacket> buffer_;

    // defense state
    std::vector<std::pair<NodeId, SimTime>> rrep_log_;
    SuspicionTable suspicion_;
    std::set<NodeId> alerted_; // suspects this node has broadcast an alert for
    std::set<std::pair<NodeId, NodeId>> seen_alerts_; // (accuser, suspect), for flood dedup
    DetectorSet detectors_;
    bool detectors_trained_ = false;
    std::vector<FeatureVec> self_patterns_;
    std::size_t harvested_total_ = 0;
    std::size_t trained_marker_ = 0;
    std::uint64_t next_probe_id_ = 1;
    // probe_id -> (target, request_id, candidate index)
    std::map<std::uint64_t, std::tuple<NodeId, std::uint32_t, std::size_t>> probes_in_flight_;

    SinkCounter sink_;
};

/// Control-plane pseudo-flow id for a node's probes in the metrics ledger.
inline FlowId probe_flow_id(NodeId origin) { return 0x40000000u + origin; }

} // namespace manetsim
