#pragma once

#include <deque>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "manetsim/engine.hpp"
#include "manetsim/link.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/node.hpp"
#include "manetsim/scenario.hpp"
#include "manetsim/trace.hpp"

namespace manetsim {

struct FlowSpec {
    FlowId id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    SimTime start;
    SimTime period;
    std::uint32_t payload_bytes = 512;
};

/// One simulation universe: engine, mobility, radio, nodes, traffic and
/// ledger, built deterministically from (config, seed). Worlds are
/// independent; the harness may run several concurrently as long as no state
/// is shared.
class World {
public:
    explicit World(ScenarioConfig config);

    World(const World&) = delete;
    World& operator=(const World&) = delete;

    /// Run to the configured horizon and finalize the ledger.
    void run();

    MetricsReport report() const;
    const MetricsLedger& ledger() const { return ledger_; }
    const ScenarioConfig& config() const { return config_; }

    Engine& engine() { return engine_; }
    Radio& radio() { return *radio_; }
    const RandomWaypointModel& mobility() const { return *mobility_; }
    Node& node(NodeId id) { return *nodes_[id]; }
    std::size_t node_count() const { return nodes_.size(); }

    const std::vector<NodeId>& attackers() const { return attackers_; }
    const std::vector<FlowSpec>& flows() const { return flows_; }
    std::uint64_t sunk_data() const;
    std::uint64_t sunk_probes() const;

    /// JSON-lines trace streams; attach before run(). Pointers must outlive
    /// the run. Tracing is an observer and never perturbs the simulation.
    void trace_events_to(std::ostream& os);
    void trace_packets_to(std::ostream& os);
    void trace_defense_to(std::ostream& os);
    void trace_mobility_to(std::ostream& os);

    TraceHooks& hooks() { return hooks_; }

private:
    void build_flows();
    void build_attackers();
    void schedule_traffic();
    void flow_tick(std::size_t flow_idx);
    std::string trace_tail() const;

    ScenarioConfig config_;
    Engine engine_;
    std::deque<std::string> recent_events_; // ring buffer for fault diagnostics
    std::ostream* events_os_ = nullptr;
    RngStream mobility_rng_;
    RngStream traffic_rng_;
    RngStream ais_rng_;
    RngStream link_rng_;
    std::unique_ptr<RandomWaypointModel> mobility_;
    std::unique_ptr<Radio> radio_;
    MetricsLedger ledger_;
    TraceHooks hooks_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::vector<FlowSpec> flows_;
    std::vector<std::uint32_t> flow_next_seq_;
    std::vector<NodeId> attackers_;
    bool ran_ = false;
};

struct RunResult {
    MetricsReport metrics;
    std::vector<NodeId> attackers;
    std::uint64_t sunk_data = 0;
    std::uint64_t sunk_probes = 0;
};

/// Build one world from the config, run it, and summarize.
RunResult run_experiment(const ScenarioConfig& config);

/// report.txt body: scenario echo, metrics, attacker roster and sink counts.
std::string run_report_text(const ScenarioConfig& config, const RunResult& result);

} // namespace manetsim
