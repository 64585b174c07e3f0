#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manetsim/ais.hpp"
#include "manetsim/link.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/time.hpp"

namespace manetsim {

enum class Variant : std::uint8_t {
    DsrBaseline,        // plain first-RREP DSR, no attackers
    DsrUnderAttack,     // plain DSR with black holes active
    AisDsrUnderAttack,  // defended DSR with black holes active
    AisDsrClean,        // defended DSR, no attackers
};

const char* to_string(Variant v);
std::optional<Variant> variant_from_string(const std::string& s);

inline bool variant_defended(Variant v) {
    return v == Variant::AisDsrUnderAttack || v == Variant::AisDsrClean;
}
inline bool variant_attacked(Variant v) {
    return v == Variant::DsrUnderAttack || v == Variant::AisDsrUnderAttack;
}

enum class AttackMode : std::uint8_t { Auto, Single, Cooperative };

struct TrafficConfig {
    std::uint32_t flows = 10;
    double rate_pps = 4.0;
    std::uint32_t payload_bytes = 512;
    double start_min_s = 0.5; // flow start offsets drawn uniformly from this range
    double start_max_s = 1.5;
};

struct AttackConfig {
    std::uint32_t attackers = 5;
    double reply_delay_s = 0.0;
    AttackMode mode = AttackMode::Auto;
    std::vector<NodeId> explicit_ids; // optional; otherwise drawn at build time
    bool allow_attacker_endpoints = false;
};

struct ProtocolConfig {
    std::size_t send_buffer_limit = 64;
    bool cached_replies = false;          // honest nodes answer RREQs from their own cache
    double discovery_timeout_s = 1.0;     // reply-wait window before a retry flood
    int discovery_retries = 2;
};

struct DefenseConfig {
    double rrep_window_s = 0.5;           // candidate collection window after the first RREP
    double probe_timeout_per_hop_s = 0.1;
    double probe_timeout_floor_s = 0.2;
    double iteration_window_s = 10.0;     // sliding window for replier RREP counting
    int isolation_alert_threshold = 2;    // independent accusers needed without direct detection
    bool alert_flood = false;             // relay alerts network-wide instead of one hop
    std::size_t self_pattern_pool = 32;
    std::size_t retrain_interval = 8;     // new self patterns between detector trainings
};

struct ScenarioConfig {
    // simulation
    std::uint32_t node_count = 100;
    double area_width = 1000.0;
    double area_height = 1000.0;
    double duration_s = 200.0;
    double pause_time_s = 0.0;
    double speed_min = 1.0;
    double speed_max = 20.0;
    std::uint64_t seed = 1;
    Variant variant = Variant::DsrBaseline;

    LinkModel link;
    TrafficConfig traffic;
    AttackConfig attack;
    ProtocolConfig protocol;
    DefenseConfig defense;
    DetectorParams detector;

    bool strict_loss = false; // count packets still buffered at the end as lost

    std::vector<Position> explicit_positions;            // [positions] section, indexed by node
    std::vector<std::pair<NodeId, NodeId>> explicit_flows; // [flows] section

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parse a scenario file. An empty file yields the defaults above. Unknown
/// sections or keys are errors, not warnings.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);

} // namespace manetsim
