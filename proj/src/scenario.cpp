#include "manetsim/scenario.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "manetsim/error.hpp"

namespace manetsim {

const char* to_string(Variant v) {
    switch (v) {
    case Variant::DsrBaseline: return "dsr-baseline";
    case Variant::DsrUnderAttack: return "dsr-under-attack";
    case Variant::AisDsrUnderAttack: return "ais-dsr-under-attack";
    case Variant::AisDsrClean: return "ais-dsr-clean";
    }
    return "?";
}

std::optional<Variant> variant_from_string(const std::string& s) {
    if (s == "dsr-baseline") return Variant::DsrBaseline;
    if (s == "dsr-under-attack") return Variant::DsrUnderAttack;
    if (s == "ais-dsr-under-attack") return Variant::AisDsrUnderAttack;
    if (s == "ais-dsr-clean") return Variant::AisDsrClean;
    return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

struct KeyValue {
    std::string section;
    std::string key;
    std::string value;
    int line;
};

std::vector<KeyValue> tokenize(const std::string& text) {
    std::vector<KeyValue> out;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) {
            line = line.substr(0, comment);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        out.push_back(KeyValue{section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
    }
    return out;
}

double parse_double(const KeyValue& kv) {
    try {
        std::size_t used = 0;
        const double v = std::stod(kv.value, &used);
        if (used != kv.value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(kv.section + "." + kv.key + ": '" + kv.value + "' is not a number");
    }
}

std::int64_t parse_int(const KeyValue& kv) {
    std::int64_t v = 0;
    const auto* first = kv.value.data();
    const auto* last = first + kv.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError(kv.section + "." + kv.key + ": '" + kv.value + "' is not an integer");
    }
    return v;
}

bool parse_bool(const KeyValue& kv) {
    if (kv.value == "true" || kv.value == "1" || kv.value == "yes" || kv.value == "on") return true;
    if (kv.value == "false" || kv.value == "0" || kv.value == "no" || kv.value == "off") return false;
    throw ConfigError(kv.section + "." + kv.key + ": '" + kv.value + "' is not a boolean");
}

std::vector<std::uint32_t> parse_id_list(const KeyValue& kv) {
    std::vector<std::uint32_t> ids;
    std::istringstream is(kv.value);
    std::string tok;
    while (is >> tok) {
        std::uint32_t v = 0;
        const auto* first = tok.data();
        auto [ptr, ec] = std::from_chars(first, first + tok.size(), v);
        if (ec != std::errc{} || ptr != first + tok.size()) {
            throw ConfigError(kv.section + "." + kv.key + ": '" + tok + "' is not a node id");
        }
        ids.push_back(v);
    }
    return ids;
}

} // namespace

ScenarioConfig parse_scenario(const std::string& text) {
    ScenarioConfig cfg;
    std::map<NodeId, Position> positions;
    std::map<std::uint32_t, std::pair<NodeId, NodeId>> flows;

    for (const KeyValue& kv : tokenize(text)) {
        const std::string where = kv.section.empty() ? kv.key : kv.section + "." + kv.key;
        if (kv.section == "simulation") {
            if (kv.key == "nodes") cfg.node_count = static_cast<std::uint32_t>(parse_int(kv));
            else if (kv.key == "area_width") cfg.area_width = parse_double(kv);
            else if (kv.key == "area_height") cfg.area_height = parse_double(kv);
            else if (kv.key == "duration_s") cfg.duration_s = parse_double(kv);
            else if (kv.key == "pause_time_s") cfg.pause_time_s = parse_double(kv);
            else if (kv.key == "speed_min") cfg.speed_min = parse_double(kv);
            else if (kv.key == "speed_max") cfg.speed_max = parse_double(kv);
            else if (kv.key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(kv));
            else if (kv.key == "variant") {
                auto v = variant_from_string(kv.value);
                if (!v) throw ConfigError(where + ": unknown variant '" + kv.value + "'");
                cfg.variant = *v;
            } else throw ConfigError(where + ": unknown key");
        } else if (kv.section == "radio") {
            if (kv.key == "range_m") cfg.link.range_m = parse_double(kv);
            else if (kv.key == "hop_latency_s") cfg.link.hop_latency = SimTime::from_seconds(parse_double(kv));
            else if (kv.key == "jitter_s") cfg.link.jitter = SimTime::from_seconds(parse_double(kv));
            else if (kv.key == "loss_prob") cfg.link.loss_prob = parse_double(kv);
            else if (kv.key == "queue_limit") cfg.link.queue_limit = static_cast<std::size_t>(parse_int(kv));
            else throw ConfigError(where + ": unknown key");
        } else if (kv.section == "traffic") {
            if (kv.key == "flows") cfg.traffic.flows = static_cast<std::uint32_t>(parse_int(kv));
            else if (kv.key == "rate_pps") cfg.traffic.rate_pps = parse_double(kv);
            else if (kv.key == "payload_bytes") cfg.traffic.payload_bytes = static_cast<std::uint32_t>(parse_int(kv));
            else if (kv.key == "start_min_s") cfg.traffic.start_min_s = parse_double(kv);
            else if (kv.key == "start_max_s") cfg.traffic.start_max_s = parse_double(kv);
            else throw ConfigError(where + ": unknown key");
        } else if (kv.section == "attack") {
            if (kv.key == "attackers") cfg.attack.attackers = static_cast<std::uint32_t>(parse_int(kv));
            else if (kv.key == "reply_delay_s") cfg.attack.reply_delay_s = parse_double(kv);
            else if (kv.key == "ids") cfg.attack.explicit_ids = parse_id_list(kv);
            else if (kv.key == "allow_attacker_endpoints") cfg.attack.allow_attacker_endpoints = parse_bool(kv);
            else if (kv.key == "mode") {
                if (kv.value == "auto") cfg.attack.mode = AttackMode::Auto;
                else if (kv.value == "single") cfg.attack.mode = AttackMode::Single;
                else if (kv.value == "cooperative") cfg.attack.mode = AttackMode::Cooperative;
                else throw ConfigError(where + ": unknown attack mode '" + kv.value + "'");
            } else throw ConfigError(where + ": unknown key");
        } else if (kv.section == "protocol") {
            if (kv.key == "send_buffer_limit") cfg.protocol.send_buffer_limit = static_cast<std::size_t>(parse_int(kv));
            else if (kv.key == "cached_replies") cfg.protocol.cached_replies = parse_bool(kv);
            else if (kv.key == "discovery_timeout_s") cfg.protocol.discovery_timeout_s = parse_double(kv);
            else if (kv.key == "discovery_retries") cfg.protocol.discovery_retries = static_cast<int>(parse_int(kv));
            else throw ConfigError(where + ": unknown key");
        } else if (kv.section == "defense") {
            if (kv.key == "rrep_window_s") cfg.defense.rrep_window_s = parse_double(kv);
            else if (kv.key == "probe_timeout_per_hop_s") cfg.defense.probe_timeout_per_hop_s = parse_double(kv);
            else if (kv.key == "probe_timeout_floor_s") cfg.defense.probe_timeout_floor_s = parse_double(kv);
            else if (kv.key == "iteration_window_s") cfg.defense.iteration_window_s = parse_double(kv);
            else if (kv.key == "isolation_alert_threshold") cfg.defense.isolation_alert_threshold = static_cast<int>(parse_int(kv));
            else if (kv.key == "alert_flood") cfg.defense.alert_flood = parse_bool(kv);
            else if (kv.key == "self_pattern_pool") cfg.defense.self_pattern_pool = static_cast<std::size_t>(parse_int(kv));
            else if (kv.key == "retrain_interval") cfg.defense.retrain_interval = static_cast<std::size_t>(parse_int(kv));
            else throw ConfigError(where + ": unknown key");
        } else if (kv.section == "detector") {
            if (kv.key == "population") cfg.detector.population = static_cast<std::size_t>(parse_int(kv));
            else if (kv.key == "top_subset") cfg.detector.top_subset = static_cast<std::size_t>(parse_int(kv));
            else if (kv.key == "clone_factor") cfg.detector.clone_factor = parse_double(kv);
            else if (kv.key == "mutation_scale") cfg.detector.mutation_scale = parse_double(kv);
            else if (kv.key == "worst_n") cfg.detector.worst_n = static_cast<std::size_t>(parse_int(kv));
            else if (kv.key == "generations") cfg.detector.generations = static_cast<std::size_t>(parse_int(kv));
            else if (kv.key == "match_threshold") cfg.detector.match_threshold = parse_double(kv);
            else throw ConfigError(where + ": unknown key");
        } else if (kv.section == "metrics") {
            if (kv.key == "strict_loss") cfg.strict_loss = parse_bool(kv);
            else throw ConfigError(where + ": unknown key");
        } else if (kv.section == "positions") {
            // keys are n<id>, values are "x y"
            if (kv.key.size() < 2 || kv.key[0] != 'n') {
                throw ConfigError(where + ": position keys must be n<id>");
            }
            std::uint32_t id = 0;
            const auto* first = kv.key.data() + 1;
            auto [ptr, ec] = std::from_chars(first, kv.key.data() + kv.key.size(), id);
            if (ec != std::errc{} || ptr != kv.key.data() + kv.key.size()) {
                throw ConfigError(where + ": position keys must be n<id>");
            }
            std::istringstream vs(kv.value);
            Position p;
            if (!(vs >> p.x >> p.y)) {
                throw ConfigError(where + ": expected 'x y'");
            }
            positions[id] = p;
        } else if (kv.section == "flows") {
            if (kv.key.size() < 2 || kv.key[0] != 'f') {
                throw ConfigError(where + ": flow keys must be f<index>");
            }
            std::uint32_t idx = 0;
            const auto* first = kv.key.data() + 1;
            auto [ptr, ec] = std::from_chars(first, kv.key.data() + kv.key.size(), idx);
            if (ec != std::errc{} || ptr != kv.key.data() + kv.key.size()) {
                throw ConfigError(where + ": flow keys must be f<index>");
            }
            std::istringstream vs(kv.value);
            NodeId src = 0, dst = 0;
            if (!(vs >> src >> dst)) {
                throw ConfigError(where + ": expected 'src dst'");
            }
            flows[idx] = {src, dst};
        } else {
            throw ConfigError("unknown section [" + kv.section + "] (line " + std::to_string(kv.line) + ")");
        }
    }

    if (!positions.empty()) {
        NodeId max_id = positions.rbegin()->first;
        cfg.explicit_positions.resize(max_id + 1);
        for (const auto& [id, p] : positions) {
            cfg.explicit_positions[id] = p;
        }
    }
    for (const auto& [idx, f] : flows) {
        cfg.explicit_flows.push_back(f);
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read scenario file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError(field + ": " + why);
    };
    if (node_count < 1) fail("simulation.nodes", "must be >= 1");
    if (area_width <= 0 || area_height <= 0) fail("simulation.area", "must be positive");
    if (duration_s <= 0) fail("simulation.duration_s", "must be positive");
    if (pause_time_s < 0) fail("simulation.pause_time_s", "must be non-negative");
    if (speed_min <= 0 || speed_max < speed_min) fail("simulation.speed", "need 0 < min <= max");
    if (link.range_m <= 0) fail("radio.range_m", "must be positive");
    if (link.hop_latency < SimTime::zero()) fail("radio.hop_latency_s", "must be non-negative");
    if (link.jitter < SimTime::zero()) fail("radio.jitter_s", "must be non-negative");
    if (link.loss_prob < 0 || link.loss_prob > 1) fail("radio.loss_prob", "must be in [0, 1]");
    if (traffic.rate_pps <= 0) fail("traffic.rate_pps", "must be positive");
    if (traffic.payload_bytes == 0) fail("traffic.payload_bytes", "must be positive");
    if (traffic.start_min_s < 0 || traffic.start_max_s < traffic.start_min_s)
        fail("traffic.start", "need 0 <= min <= max");
    if (attack.attackers >= node_count) fail("attack.attackers", "must be smaller than simulation.nodes");
    if (attack.reply_delay_s < 0) fail("attack.reply_delay_s", "must be non-negative");
    if (attack.mode == AttackMode::Single && attack.attackers > 1)
        fail("attack.mode", "single mode allows at most one attacker");
    if (!attack.explicit_ids.empty() && attack.explicit_ids.size() != attack.attackers)
        fail("attack.ids", "must list exactly attack.attackers ids");
    for (NodeId id : attack.explicit_ids) {
        if (id >= node_count) fail("attack.ids", "id " + std::to_string(id) + " out of range");
    }
    if (protocol.discovery_timeout_s <= 0) fail("protocol.discovery_timeout_s", "must be positive");
    if (protocol.discovery_retries < 0) fail("protocol.discovery_retries", "must be non-negative");
    if (defense.rrep_window_s <= 0) fail("defense.rrep_window_s", "must be positive");
    if (defense.probe_timeout_per_hop_s <= 0) fail("defense.probe_timeout_per_hop_s", "must be positive");
    if (defense.probe_timeout_floor_s <= 0) fail("defense.probe_timeout_floor_s", "must be positive");
    if (defense.iteration_window_s <= 0) fail("defense.iteration_window_s", "must be positive");
    if (defense.isolation_alert_threshold < 1) fail("defense.isolation_alert_threshold", "must be >= 1");
    if (defense.self_pattern_pool < 1) fail("defense.self_pattern_pool", "must be >= 1");
    if (defense.retrain_interval < 1) fail("defense.retrain_interval", "must be >= 1");
    if (detector.population == 0) fail("detector.population", "must be positive");
    if (detector.top_subset == 0) fail("detector.top_subset", "must be positive");
    if (detector.worst_n >= detector.population) fail("detector.worst_n", "must be below detector.population");
    if (detector.generations == 0) fail("detector.generations", "must be positive");
    if (detector.match_threshold < 0 || detector.match_threshold > 1)
        fail("detector.match_threshold", "must be in [0, 1]");
    if (detector.clone_factor <= 0) fail("detector.clone_factor", "must be positive");
    if (detector.mutation_scale < 0) fail("detector.mutation_scale", "must be non-negative");
    if (explicit_positions.size() > node_count)
        fail("positions", "more positions than simulation.nodes");
    for (const auto& [src, dst] : explicit_flows) {
        if (src >= node_count || dst >= node_count) fail("flows", "endpoint out of range");
        if (src == dst) fail("flows", "flow source equals destination");
    }
}

} // namespace manetsim
