#include "manetsim/defense.hpp"

#include <algorithm>

#include "manetsim/error.hpp"

namespace manetsim {

double infection_probability(int probe_successes, int probe_failures) {
    if (probe_successes < 0 || probe_failures < 0 || probe_successes + probe_failures != kProbeCount) {
        throw Error("infection_probability: probe tally incomplete (" +
                    std::to_string(probe_successes) + " + " + std::to_string(probe_failures) +
                    " != " + std::to_string(kProbeCount) + ")");
    }
    return static_cast<double>(probe_failures) / static_cast<double>(kProbeCount);
}

double infection_probability(const RouteCandidate& candidate) {
    return infection_probability(candidate.probe_successes, candidate.probe_failures);
}

double route_fitness(int hop_count, int max_hop_count, int iteration, int max_iteration) {
    if (hop_count < 1 || max_hop_count < 1 || iteration < 1 || max_iteration < 1) {
        throw Error("route_fitness: arguments must be >= 1");
    }
    if (hop_count > max_hop_count || iteration > max_iteration) {
        throw Error("route_fitness: arguments exceed their maxima");
    }
    return static_cast<double>(hop_count) / static_cast<double>(max_hop_count) +
           static_cast<double>(max_iteration) / static_cast<double>(iteration);
}

double secure_score(double p_bh, double fitness) {
    if (p_bh < 0 || p_bh > 1) {
        throw Error("secure_score: p_bh must be in [0, 1]");
    }
    if (fitness < 0) {
        throw Error("secure_score: fitness must be non-negative");
    }
    return (1.0 - p_bh) * fitness;
}

int rrep_iteration_count(const std::vector<std::pair<NodeId, SimTime>>& rrep_log, NodeId replier,
                         SimTime at, SimTime window) {
    int count = 0;
    const SimTime lower = at - window;
    for (const auto& [from, t] : rrep_log) {
        if (from == replier && t > lower && t <= at) {
            ++count;
        }
    }
    return count;
}

void score_candidates(std::vector<RouteCandidate>& candidates) {
    if (candidates.empty()) {
        return;
    }
    int max_hop = 1;
    int max_iter = 1;
    for (const auto& c : candidates) {
        max_hop = std::max(max_hop, c.hop_count);
        max_iter = std::max(max_iter, c.replier_rrep_iterations);
    }
    for (auto& c : candidates) {
        c.p_bh = infection_probability(c);
        c.fitness = route_fitness(c.hop_count, max_hop, c.replier_rrep_iterations, max_iter);
        c.secure_score = secure_score(c.p_bh, c.fitness);
    }
}

std::optional<std::size_t> select_route(const std::vector<RouteCandidate>& candidates,
                                        const std::function<bool(const RouteRecord&)>& route_blocked) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const RouteCandidate& c = candidates[i];
        if (c.p_bh > 0.5) {
            continue;
        }
        if (route_blocked && route_blocked(c.route)) {
            continue;
        }
        if (!best) {
            best = i;
            continue;
        }
        const RouteCandidate& b = candidates[*best];
        if (c.secure_score > b.secure_score ||
            (c.secure_score == b.secure_score &&
             (c.hop_count < b.hop_count ||
              (c.hop_count == b.hop_count && c.route.hops() < b.route.hops())))) {
            best = i;
        }
    }
    return best;
}

FeatureVec candidate_features(const RouteCandidate& c, int max_hop_count) {
    const double hop_ratio = max_hop_count > 0
                                 ? static_cast<double>(c.hop_count) / static_cast<double>(max_hop_count)
                                 : 1.0;
    const double iter_rate = std::min(1.0, static_cast<double>(c.replier_rrep_iterations) / 10.0);
    const double failure_rate = static_cast<double>(c.probe_failures) / static_cast<double>(kProbeCount);
    return FeatureVec{hop_ratio, iter_rate, failure_rate};
}

bool SuspicionTable::maybe_isolate(Entry& e) {
    if (e.isolated) {
        return false;
    }
    const int count = e.direct + e.advisory + static_cast<int>(e.accusers.size());
    if (e.direct >= 1 || count >= alert_threshold_) {
        e.isolated = true;
        return true;
    }
    return false;
}

SuspicionTable::Entry& SuspicionTable::touch(NodeId suspect, SimTime now) {
    auto [it, inserted] = entries_.try_emplace(suspect);
    if (inserted) {
        it->second.first_seen = now;
    }
    return it->second;
}

bool SuspicionTable::record_direct(NodeId suspect, SimTime now) {
    Entry& e = touch(suspect, now);
    ++e.direct;
    return maybe_isolate(e);
}

bool SuspicionTable::record_alert(NodeId suspect, NodeId accuser, SimTime now) {
    if (suspect == accuser) {
        return false; // self-accusation carries no weight
    }
    Entry& e = touch(suspect, now);
    e.accusers.insert(accuser);
    return maybe_isolate(e);
}

bool SuspicionTable::record_advisory(NodeId suspect, SimTime now) {
    Entry& e = touch(suspect, now);
    ++e.advisory;
    return maybe_isolate(e);
}

bool SuspicionTable::isolated(NodeId node) const {
    auto it = entries_.find(node);
    return it != entries_.end() && it->second.isolated;
}

int SuspicionTable::suspicion_count(NodeId node) const {
    auto it = entries_.find(node);
    if (it == entries_.end()) {
        return 0;
    }
    return it->second.direct + it->second.advisory + static_cast<int>(it->second.accusers.size());
}

std::optional<SimTime> SuspicionTable::first_seen(NodeId node) const {
    auto it = entries_.find(node);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second.first_seen;
}

std::vector<NodeId> SuspicionTable::isolated_nodes() const {
    std::vector<NodeId> out;
    for (const auto& [id, e] : entries_) {
        if (e.isolated) {
            out.push_back(id);
        }
    }
    return out;
}

} // namespace manetsim
