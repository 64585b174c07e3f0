#include "manetsim/mobility.hpp"

#include "manetsim/error.hpp"

namespace manetsim {

RandomWaypointModel::RandomWaypointModel(Engine& engine, RngStream& rng, MobilityConfig cfg,
                                         std::size_t node_count,
                                         const std::vector<Position>* initial_positions)
    : engine_(engine), rng_(rng), cfg_(cfg) {
    if (cfg_.speed_min <= 0 || cfg_.speed_max < cfg_.speed_min) {
        throw ConfigError("mobility speed range must satisfy 0 < min <= max");
    }
    legs_.resize(node_count);
    for (std::size_t n = 0; n < node_count; ++n) {
        Position p;
        if (initial_positions && n < initial_positions->size()) {
            p = (*initial_positions)[n];
            if (p.x < 0 || p.x > cfg_.area_width || p.y < 0 || p.y > cfg_.area_height) {
                throw ConfigError("initial position of node " + std::to_string(n) + " is out of bounds");
            }
        } else {
            p.x = rng_.uniform_double() * cfg_.area_width;
            p.y = rng_.uniform_double() * cfg_.area_height;
        }
        legs_[n] = Leg{SimTime::zero(), p, p, 0.0, SimTime::zero(), false};
    }
}

void RandomWaypointModel::start() {
    for (NodeId n = 0; n < legs_.size(); ++n) {
        if (trace_) {
            trace_(engine_.now(), n, legs_[n].from);
        }
        engine_.schedule(engine_.now() + cfg_.pause_time, EventKind::MobilityWaypoint, static_cast<std::int32_t>(n),
                         0, [this, n] { begin_leg(n); });
    }
}

Position RandomWaypointModel::draw_waypoint() {
    Position p;
    p.x = rng_.uniform_double() * cfg_.area_width;
    p.y = rng_.uniform_double() * cfg_.area_height;
    return p;
}

void RandomWaypointModel::begin_leg(NodeId node) {
    Leg& leg = legs_[node];
    const Position from = leg.to; // wherever the node is resting now
    const Position to = draw_waypoint();
    const double speed = cfg_.speed_min + rng_.uniform_double() * (cfg_.speed_max - cfg_.speed_min);
    const double dist = distance(from, to);
    const SimTime travel = SimTime::from_seconds(dist / speed);
    leg = Leg{engine_.now(), from, to, speed, engine_.now() + travel, true};
    if (trace_) {
        trace_(engine_.now(), node, from);
    }
    engine_.schedule(leg.arrive, EventKind::MobilityWaypoint, static_cast<std::int32_t>(node), 1,
                     [this, node] { arrive(node); });
}

void RandomWaypointModel::arrive(NodeId node) {
    Leg& leg = legs_[node];
    leg = Leg{engine_.now(), leg.to, leg.to, 0.0, engine_.now(), false};
    if (trace_) {
        trace_(engine_.now(), node, leg.from);
    }
    engine_.schedule(engine_.now() + cfg_.pause_time, EventKind::MobilityWaypoint, static_cast<std::int32_t>(node),
                     0, [this, node] { begin_leg(node); });
}

Position RandomWaypointModel::position_at(NodeId node, SimTime t) const {
    if (node >= legs_.size()) {
        throw ProtocolFault("position query for unknown node " + std::to_string(node));
    }
    const Leg& leg = legs_[node];
    if (!leg.moving || t <= leg.depart) {
        return leg.moving ? leg.from : leg.to;
    }
    if (t >= leg.arrive) {
        return leg.to;
    }
    const double total = (leg.arrive - leg.depart).seconds();
    const double frac = total > 0 ? (t - leg.depart).seconds() / total : 1.0;
    return Position{leg.from.x + (leg.to.x - leg.from.x) * frac,
                    leg.from.y + (leg.to.y - leg.from.y) * frac};
}

} // namespace manetsim
