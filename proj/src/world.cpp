#include "manetsim/world.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

#include <json.hpp>

#include "manetsim/error.hpp"

namespace manetsim {

World::World(ScenarioConfig config)
    : config_(std::move(config)),
      mobility_rng_(config_.seed, "mobility"),
      traffic_rng_(config_.seed, "traffic"),
      ais_rng_(config_.seed, "ais-mutation"),
      link_rng_(config_.seed, "link") {
    config_.validate();

    MobilityConfig mcfg;
    mcfg.area_width = config_.area_width;
    mcfg.area_height = config_.area_height;
    mcfg.speed_min = config_.speed_min;
    mcfg.speed_max = config_.speed_max;
    mcfg.pause_time = SimTime::from_seconds(config_.pause_time_s);
    mobility_ = std::make_unique<RandomWaypointModel>(
        engine_, mobility_rng_, mcfg, config_.node_count,
        config_.explicit_positions.empty() ? nullptr : &config_.explicit_positions);

    radio_ = std::make_unique<Radio>(engine_, *mobility_, link_rng_, config_.link);

    build_flows();
    build_attackers();

    const bool defended = variant_defended(config_.variant);
    std::set<NodeId> attacker_set(attackers_.begin(), attackers_.end());
    NodeEnv env{engine_, *radio_, ledger_, ais_rng_, config_, hooks_,
                [this](NodeId owner, NodeId a, NodeId b) { nodes_[owner]->invalidate_link(a, b); }};
    nodes_.reserve(config_.node_count);
    for (NodeId id = 0; id < config_.node_count; ++id) {
        const Role role = attacker_set.count(id) ? Role::Blackhole : Role::Honest;
        nodes_.push_back(std::make_unique<Node>(id, role, defended && role == Role::Honest, env));
    }

    radio_->set_delivery_handler(
        [this](NodeId to, NodeId from, const Packet& p) { nodes_[to]->receive(from, p); });

    mobility_->start();
    schedule_traffic();

    // end-of-run marker; emitted into the event trace when enabled
    engine_.schedule(SimTime::from_seconds(config_.duration_s), EventKind::MetricSnapshot, -1, 0, [] {});

    // every processed event feeds the fault ring buffer and, when attached,
    // the JSON-lines event trace
    engine_.set_trace([this](const Event& ev) {
        if (recent_events_.size() >= 16) {
            recent_events_.pop_front();
        }
        recent_events_.push_back(std::string(to_string(ev.kind)) + " t=" +
                                 std::to_string(ev.fire_at.us()) + "us seq=" + std::to_string(ev.seq) +
                                 " node=" + std::to_string(ev.node));
        if (events_os_) {
            nlohmann::json j{{"t", ev.fire_at.us()},
                             {"seq", ev.seq},
                             {"kind", to_string(ev.kind)},
                             {"node", ev.node},
                             {"detail", ev.detail}};
            *events_os_ << j.dump() << "\n";
        }
    });
}

std::string World::trace_tail() const {
    std::string out;
    for (const auto& line : recent_events_) {
        out += "\n  " + line;
    }
    return out;
}

void World::build_flows() {
    const auto& tc = config_.traffic;
    std::vector<std::pair<NodeId, NodeId>> pairs = config_.explicit_flows;
    if (pairs.empty()) {
        if (config_.node_count < 2 && tc.flows > 0) {
            throw ConfigError("traffic.flows: need at least two nodes for traffic");
        }
        for (std::uint32_t i = 0; i < tc.flows; ++i) {
            const NodeId src = static_cast<NodeId>(traffic_rng_.uniform_int(0, config_.node_count - 1));
            NodeId dst = src;
            while (dst == src) {
                dst = static_cast<NodeId>(traffic_rng_.uniform_int(0, config_.node_count - 1));
            }
            pairs.emplace_back(src, dst);
        }
    }
    const SimTime period = SimTime::from_seconds(1.0 / tc.rate_pps);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        FlowSpec f;
        f.id = static_cast<FlowId>(i);
        f.src = pairs[i].first;
        f.dst = pairs[i].second;
        f.period = period;
        f.payload_bytes = tc.payload_bytes;
        const double offset =
            tc.start_min_s + traffic_rng_.uniform_double() * (tc.start_max_s - tc.start_min_s);
        f.start = SimTime::from_seconds(offset);
        flows_.push_back(f);
    }
    flow_next_seq_.assign(flows_.size(), 0);
}

void World::build_attackers() {
    if (!variant_attacked(config_.variant) || config_.attack.attackers == 0) {
        return;
    }
    std::set<NodeId> endpoints;
    for (const auto& f : flows_) {
        endpoints.insert(f.src);
        endpoints.insert(f.dst);
    }
    if (!config_.attack.explicit_ids.empty()) {
        for (NodeId id : config_.attack.explicit_ids) {
            if (endpoints.count(id) && !config_.attack.allow_attacker_endpoints) {
                throw ConfigError("attack.ids: node " + std::to_string(id) +
                                  " is a traffic endpoint (set attack.allow_attacker_endpoints to override)");
            }
        }
        attackers_ = config_.attack.explicit_ids;
        std::sort(attackers_.begin(), attackers_.end());
        return;
    }
    std::vector<NodeId> eligible;
    for (NodeId id = 0; id < config_.node_count; ++id) {
        if (!endpoints.count(id)) {
            eligible.push_back(id);
        }
    }
    if (eligible.size() < config_.attack.attackers) {
        throw ConfigError("attack.attackers: only " + std::to_string(eligible.size()) +
                          " nodes are free of traffic endpoints");
    }
    for (std::uint32_t k = 0; k < config_.attack.attackers; ++k) {
        const auto idx = static_cast<std::size_t>(
            traffic_rng_.uniform_int(0, static_cast<std::int64_t>(eligible.size()) - 1));
        attackers_.push_back(eligible[idx]);
        eligible.erase(eligible.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    std::sort(attackers_.begin(), attackers_.end());
}

void World::schedule_traffic() {
    const SimTime horizon = SimTime::from_seconds(config_.duration_s);
    for (std::size_t i = 0; i < flows_.size(); ++i) {
        const FlowSpec& f = flows_[i];
        // traffic stops one period before the horizon so the tail can land
        if (f.start + f.period > horizon) {
            continue;
        }
        engine_.schedule(f.start, EventKind::TrafficTick, static_cast<std::int32_t>(f.src), f.id,
                         [this, i] { flow_tick(i); });
    }
}

void World::flow_tick(std::size_t flow_idx) {
    FlowSpec& f = flows_[flow_idx];
    const std::uint32_t seq = flow_next_seq_[flow_idx]++;
    nodes_[f.src]->send_data(f.id, seq, f.dst, f.payload_bytes);
    const SimTime next = engine_.now() + f.period;
    if (next + f.period <= SimTime::from_seconds(config_.duration_s)) {
        engine_.schedule(next, EventKind::TrafficTick, static_cast<std::int32_t>(f.src), f.id,
                         [this, flow_idx] { flow_tick(flow_idx); });
    }
}

void World::run() {
    if (ran_) {
        throw Error("world already ran");
    }
    ran_ = true;
    try {
        engine_.run_until(SimTime::from_seconds(config_.duration_s));
    } catch (const EngineFault& e) {
        throw EngineFault(std::string(e.what()) + "\nlast events:" + trace_tail());
    }
    for (auto& n : nodes_) {
        n->mark_end_buffered();
    }
}

MetricsReport World::report() const {
    return build_report(ledger_, config_.duration_s, radio_->control_transmissions(),
                        config_.strict_loss);
}

std::uint64_t World::sunk_data() const {
    std::uint64_t total = 0;
    for (const auto& n : nodes_) {
        total += n->sink_counter().data;
    }
    return total;
}

std::uint64_t World::sunk_probes() const {
    std::uint64_t total = 0;
    for (const auto& n : nodes_) {
        total += n->sink_counter().probes;
    }
    return total;
}

void World::trace_events_to(std::ostream& os) { events_os_ = &os; }

void World::trace_packets_to(std::ostream& os) {
    hooks_.packet = [&os](const PacketTraceEvent& ev) {
        nlohmann::json j{{"t", ev.t.us()},   {"event", ev.event}, {"kind", ev.kind},
                         {"from", ev.from},  {"to", ev.to},       {"flow", ev.flow},
                         {"seq", ev.seq},    {"route", ev.route.hops()}};
        if (!ev.detail.empty()) {
            j["detail"] = ev.detail;
        }
        os << j.dump() << "\n";
    };
}

void World::trace_defense_to(std::ostream& os) {
    hooks_.defense = [&os](const DefenseTraceEvent& ev) {
        nlohmann::json cands = nlohmann::json::array();
        for (const auto& c : ev.candidates) {
            cands.push_back({{"route", c.route.hops()},
                             {"hops", c.hop_count},
                             {"iter", c.replier_rrep_iterations},
                             {"p_bh", c.p_bh},
                             {"fr", c.fitness},
                             {"score", c.secure_score}});
        }
        nlohmann::json j{{"t", ev.t.us()},
                         {"origin", ev.origin},
                         {"discovery", ev.discovery},
                         {"candidates", cands},
                         {"alerts", ev.alerts}};
        if (ev.chosen) {
            j["chosen"] = ev.chosen->hops();
        } else {
            j["chosen"] = nullptr;
        }
        nlohmann::json rejected = nlohmann::json::array();
        for (const auto& r : ev.rejected) {
            rejected.push_back(r.hops());
        }
        j["rejected"] = rejected;
        os << j.dump() << "\n";
    };
}

void World::trace_mobility_to(std::ostream& os) {
    // snapshot current positions so the trace starts complete
    for (NodeId n = 0; n < mobility_->node_count(); ++n) {
        const Position p = mobility_->position_at(n, engine_.now());
        nlohmann::json j{{"t", engine_.now().us()}, {"node", n}, {"x", p.x}, {"y", p.y}};
        os << j.dump() << "\n";
    }
    mobility_->set_trace([&os](SimTime t, NodeId node, const Position& p) {
        nlohmann::json j{{"t", t.us()}, {"node", node}, {"x", p.x}, {"y", p.y}};
        os << j.dump() << "\n";
    });
}

RunResult run_experiment(const ScenarioConfig& config) {
    World world(config);
    world.run();
    RunResult result;
    result.metrics = world.report();
    result.attackers = world.attackers();
    result.sunk_data = world.sunk_data();
    result.sunk_probes = world.sunk_probes();
    return result;
}

std::string run_report_text(const ScenarioConfig& config, const RunResult& result) {
    std::string out;
    auto line = [&out](const std::string& key, const std::string& value) {
        out += key;
        out.append(key.size() < 22 ? 22 - key.size() : 1, ' ');
        out += "= " + value + "\n";
    };
    auto fmt = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    line("variant", to_string(config.variant));
    line("seed", std::to_string(config.seed));
    line("nodes", std::to_string(config.node_count));
    line("area", fmt(config.area_width) + " x " + fmt(config.area_height));
    line("duration_s", fmt(config.duration_s));
    line("pause_time_s", fmt(config.pause_time_s));
    line("flows", std::to_string(config.traffic.flows));
    out += report_text(result.metrics);
    std::string roster;
    for (NodeId id : result.attackers) {
        if (!roster.empty()) {
            roster += " ";
        }
        roster += std::to_string(id);
    }
    line("attackers", roster.empty() ? "none" : roster);
    line("sunk_data", std::to_string(result.sunk_data));
    line("sunk_probes", std::to_string(result.sunk_probes));
    return out;
}

} // namespace manetsim
