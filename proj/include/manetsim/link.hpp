#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "manetsim/engine.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/rng.hpp"

namespace manetsim {

/// Unit-disk radio abstraction: fixed range, constant per-hop latency plus
/// uniform jitter, optional independent loss. MAC contention and PHY fading
/// are out of scope; the routing layer never reads them.
struct LinkModel {
    double range_m = 250.0;
    SimTime hop_latency = SimTime::from_us(2000);
    SimTime jitter = SimTime::from_us(1000);
    double loss_prob = 0.0;
    std::size_t queue_limit = 0; // outbound transmissions in flight per node; 0 = unbounded
};

class Radio {
public:
    /// Invoked when a packet arrives at a node: (receiver, transmitter, packet).
    using DeliveryFn = std::function<void(NodeId, NodeId, const Packet&)>;

    Radio(Engine& engine, const RandomWaypointModel& mobility, RngStream& link_rng, LinkModel model);

    void set_delivery_handler(DeliveryFn fn) { deliver_ = std::move(fn); }

    /// Transmit to one named receiver (when `unicast_to` is set) or to every
    /// neighbor. Returns the number of delivery events scheduled, or nullopt
    /// when the sender's outbound queue is full (Drop Tail). An out-of-range
    /// unicast is not an error: it schedules nothing and upper layers learn
    /// of it by timeout.
    std::optional<std::size_t> transmit(NodeId from, std::optional<NodeId> unicast_to, const Packet& packet);

    bool in_range(NodeId a, NodeId b, SimTime t) const;

    /// All nodes within `range_m` of `node` (closed ball), ascending id.
    std::vector<NodeId> neighbors(NodeId node, SimTime t) const;

    std::uint64_t control_transmissions() const { return control_transmissions_; }
    const LinkModel& model() const { return model_; }

private:
    Engine& engine_;
    const RandomWaypointModel& mobility_;
    RngStream& rng_;
    LinkModel model_;
    DeliveryFn deliver_;
    std::vector<std::size_t> outstanding_; // in-flight transmissions per sender
    std::uint64_t control_transmissions_ = 0;
};

} // namespace manetsim
