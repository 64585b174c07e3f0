#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "manetsim/engine.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/rng.hpp"
#include "manetsim/time.hpp"

namespace manetsim {

struct Position {
    double x = 0;
    double y = 0;
};

inline double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct MobilityConfig {
    double area_width = 1000.0;
    double area_height = 1000.0;
    double speed_min = 1.0;  // m/s
    double speed_max = 20.0; // m/s
    SimTime pause_time;      // dwell at each waypoint (and before first departure)
};

/// Random-waypoint mobility. Every node starts paused at its initial
/// position for pause_time, then repeats: pick a uniform waypoint, travel at
/// a uniform speed, pause. Positions are interpolated on demand, so the
/// engine only sees one event per leg boundary.
class RandomWaypointModel {
public:
    using TraceFn = std::function<void(SimTime t, NodeId node, const Position&)>;

    RandomWaypointModel(Engine& engine, RngStream& rng, MobilityConfig cfg, std::size_t node_count,
                        const std::vector<Position>* initial_positions = nullptr);

    /// Schedule the first departure of every node. Call once before running.
    void start();

    Position position_at(NodeId node, SimTime t) const;

    std::size_t node_count() const { return legs_.size(); }

    void set_trace(TraceFn fn) { trace_ = std::move(fn); }

private:
    struct Leg {
        SimTime depart;  // when motion (or the current pause) began
        Position from;
        Position to;     // == from while paused
        double speed = 0;
        SimTime arrive;  // when `to` is reached; == depart while paused indefinitely
        bool moving = false;
    };

    void begin_leg(NodeId node);
    void arrive(NodeId node);
    Position draw_waypoint();

    Engine& engine_;
    RngStream& rng_;
    MobilityConfig cfg_;
    std::vector<Leg> legs_;
    TraceFn trace_;
};

} // namespace manetsim
