#include "manetsim/link.hpp"

#include <memory>

#include "manetsim/error.hpp"

namespace manetsim {

Radio::Radio(Engine& engine, const RandomWaypointModel& mobility, RngStream& link_rng, LinkModel model)
    : engine_(engine), mobility_(mobility), rng_(link_rng), model_(model),
      outstanding_(mobility.node_count(), 0) {
    if (model_.range_m <= 0) {
        throw ConfigError("radio range must be positive");
    }
    if (model_.loss_prob < 0 || model_.loss_prob > 1) {
        throw ConfigError("loss probability must be in [0, 1]");
    }
}

bool Radio::in_range(NodeId a, NodeId b, SimTime t) const {
    if (a == b) {
        return false;
    }
    return distance(mobility_.position_at(a, t), mobility_.position_at(b, t)) <= model_.range_m;
}

std::vector<NodeId> Radio::neighbors(NodeId node, SimTime t) const {
    std::vector<NodeId> out;
    const Position p = mobility_.position_at(node, t);
    for (NodeId u = 0; u < mobility_.node_count(); ++u) {
        if (u == node) {
            continue;
        }
        if (distance(p, mobility_.position_at(u, t)) <= model_.range_m) {
            out.push_back(u);
        }
    }
    return out;
}

std::optional<std::size_t> Radio::transmit(NodeId from, std::optional<NodeId> unicast_to,
                                           const Packet& packet) {
    if (model_.queue_limit > 0 && outstanding_[from] >= model_.queue_limit) {
        return std::nullopt; // Drop Tail at the sender
    }
    const SimTime now = engine_.now();
    std::vector<NodeId> receivers;
    if (unicast_to) {
        if (*unicast_to != from && in_range(from, *unicast_to, now)) {
            receivers.push_back(*unicast_to);
        }
    } else {
        receivers = neighbors(from, now);
    }
    if (!is_data(packet)) {
        ++control_transmissions_;
    }

    // shared countdown so the sender's queue slot frees when the last copy lands
    auto remaining = std::make_shared<std::size_t>(receivers.size());
    std::size_t scheduled = 0;
    if (receivers.empty()) {
        return 0;
    }
    ++outstanding_[from];
    for (NodeId to : receivers) {
        const SimTime jitter = model_.jitter.us() > 0
                                   ? SimTime::from_us(rng_.uniform_int(0, model_.jitter.us()))
                                   : SimTime::zero();
        const bool lost = rng_.uniform_double() < model_.loss_prob;
        if (lost) {
            if (--*remaining == 0) {
                --outstanding_[from];
            }
            continue;
        }
        engine_.schedule(now + model_.hop_latency + jitter, EventKind::PacketDelivery,
                         static_cast<std::int32_t>(to), packet.index(),
                         [this, to, from, packet, remaining] {
                             if (--*remaining == 0) {
                                 --outstanding_[from];
                             }
                             if (deliver_) {
                                 deliver_(to, from, packet);
                             }
                         });
        ++scheduled;
    }
    return scheduled;
}

} // namespace manetsim
