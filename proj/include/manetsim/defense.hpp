#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "manetsim/ais.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/time.hpp"

namespace manetsim {

/// A discovered route together with everything the source observed about it:
/// shape, replier chattiness, and probe outcomes.
struct RouteCandidate {
    RouteRecord route;
    NodeId replier = 0;
    int hop_count = 0;                 // length(route) - 1
    int replier_rrep_iterations = 1;   // RREPs from replier in the sliding window
    int probe_successes = 0;
    int probe_failures = 0;
    double p_bh = 0;        // route infection probability
    double fitness = 0;     // Fr
    double secure_score = 0;
    bool replier_claims_cached = false;
};

constexpr int kProbeCount = 3; // confirmation packets per candidate route

/// Probe-failure fraction over the three probes. Requires a complete tally.
double infection_probability(int probe_successes, int probe_failures);
double infection_probability(const RouteCandidate& candidate);

/// Fr = hop_count/max_hop_count + max_iteration/iteration. Larger hop counts
/// and quieter repliers score higher; the forged short-and-chatty reply
/// pattern scores lowest. All arguments must be >= 1 and bounded by their maxima.
double route_fitness(int hop_count, int max_hop_count, int iteration, int max_iteration);

/// score = (1 - p_bh) * fitness.
double secure_score(double p_bh, double fitness);

/// Count of RREPs from `replier` in the half-open interval (at-window, at].
/// The log holds every (replier, arrival) pair the origin has seen; the
/// result is >= 1 whenever the triggering RREP itself is logged.
int rrep_iteration_count(const std::vector<std::pair<NodeId, SimTime>>& rrep_log, NodeId replier,
                         SimTime at, SimTime window);

/// Compute p_bh, Fr and the secure score for every candidate, taking the
/// maxima over the candidate set itself. Probing must be complete.
void score_candidates(std::vector<RouteCandidate>& candidates);

/// Route selection: reject candidates with p_bh > 0.5, drop routes the
/// caller blocks (isolated nodes), then pick the maximum secure score.
/// Ties break toward fewer hops, then the lexicographically smallest route.
/// Returns the index of the winner, or nullopt when every candidate fails.
std::optional<std::size_t> select_route(
    const std::vector<RouteCandidate>& candidates,
    const std::function<bool(const RouteRecord&)>& route_blocked = nullptr);

/// Per-node ledger of suspected black holes. One direct detection (a fully
/// infected route traced back to its replier) isolates immediately;
/// otherwise isolation needs `alert_threshold` independent accusers.
/// Isolation is monotone: a suspect is never un-isolated within a run.
class SuspicionTable {
public:
    explicit SuspicionTable(int alert_threshold = 2) : alert_threshold_(alert_threshold) {}

    /// Own observation (p_bh = 1). Returns true when this call isolates.
    bool record_direct(NodeId suspect, SimTime now);

    /// One-hop alert heard from `accuser`. Duplicate accusers count once.
    /// Returns true when this call isolates.
    bool record_alert(NodeId suspect, NodeId accuser, SimTime now);

    /// Advisory detector verdict; counts like an alert but carries no accuser
    /// identity, so every verdict increments.
    bool record_advisory(NodeId suspect, SimTime now);

    bool isolated(NodeId node) const;
    int suspicion_count(NodeId node) const;
    std::optional<SimTime> first_seen(NodeId node) const;
    std::vector<NodeId> isolated_nodes() const;

private:
    struct Entry {
        int direct = 0;
        int advisory = 0;
        std::set<NodeId> accusers;
        SimTime first_seen;
        bool isolated = false;
    };
    Entry& touch(NodeId suspect, SimTime now);
    bool maybe_isolate(Entry& e);

    int alert_threshold_;
    std::map<NodeId, Entry> entries_;
};

/// Feature encoding used both for detector training and classification.
FeatureVec candidate_features(const RouteCandidate& candidate, int max_hop_count);

} // namespace manetsim
