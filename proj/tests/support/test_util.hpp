#pragma once

#include <algorithm>
#include <queue>
#include <set>
#include <vector>

#include "manetsim/scenario.hpp"
#include "manetsim/world.hpp"

namespace manetsim::testutil {

/// Quiet scenario skeleton for hand-built topologies: static nodes, no
/// default traffic, generous discovery timeout so request ids stay stable.
inline ScenarioConfig static_scenario(std::vector<Position> positions, double duration_s = 30.0) {
    ScenarioConfig cfg;
    cfg.node_count = static_cast<std::uint32_t>(positions.size());
    cfg.area_width = 1000;
    cfg.area_height = 1000;
    cfg.duration_s = duration_s;
    cfg.pause_time_s = duration_s; // fully static
    cfg.seed = 1;
    cfg.traffic.flows = 0;
    cfg.attack.attackers = 0;
    cfg.explicit_positions = std::move(positions);
    return cfg;
}

/// The deterministic attack topology: an honest chain 0-1-2-3 with a black
/// hole (node 4) parked off the chain but inside the origin's radio range.
///
///   0 --- 1 --- 2 --- 3      (200 m spacing, range 250 m)
///         |
///         4   (black hole at (200,100); hears 0, 1, 2 but not 3)
inline ScenarioConfig line_attack_scenario(double duration_s = 30.0) {
    ScenarioConfig cfg = static_scenario({{0, 0}, {200, 0}, {400, 0}, {600, 0}, {200, 100}}, duration_s);
    cfg.traffic.flows = 1;
    cfg.explicit_flows = {{0, 3}};
    cfg.attack.attackers = 1;
    cfg.attack.explicit_ids = {4};
    return cfg;
}

/// In-memory packet trace for assertions.
struct PacketLog {
    std::vector<PacketTraceEvent> events;

    void attach(World& world) {
        world.hooks().packet = [this](const PacketTraceEvent& ev) { events.push_back(ev); };
    }

    std::vector<PacketTraceEvent> filter(const std::string& event, const std::string& kind) const {
        std::vector<PacketTraceEvent> out;
        for (const auto& ev : events) {
            if (ev.event == event && ev.kind == kind) {
                out.push_back(ev);
            }
        }
        return out;
    }

    std::size_t count(const std::string& event, const std::string& kind) const {
        return filter(event, kind).size();
    }
};

/// In-memory defense trace.
struct DefenseLog {
    std::vector<DefenseTraceEvent> events;
    void attach(World& world) {
        world.hooks().defense = [this](const DefenseTraceEvent& ev) { events.push_back(ev); };
    }
};

/// Brute-force connectivity check over the unit-disk graph at time t.
inline bool connected(World& world, SimTime t) {
    const std::size_t n = world.node_count();
    if (n == 0) {
        return true;
    }
    std::set<NodeId> seen{0};
    std::queue<NodeId> frontier;
    frontier.push(0);
    while (!frontier.empty()) {
        const NodeId u = frontier.front();
        frontier.pop();
        for (NodeId v : world.radio().neighbors(u, t)) {
            if (seen.insert(v).second) {
                frontier.push(v);
            }
        }
    }
    return seen.size() == n;
}

/// True when consecutive hops of the route are mutually in range at t.
inline bool route_valid(World& world, const RouteRecord& route, SimTime t) {
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        if (!world.radio().in_range(route[i], route[i + 1], t)) {
            return false;
        }
    }
    return true;
}

} // namespace manetsim::testutil
