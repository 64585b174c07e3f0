#include "manetsim/node.hpp"

#include <algorithm>

#include "manetsim/error.hpp"

namespace manetsim {

// ---------------------------------------------------------------- RouteCache

void RouteCache::add(NodeId dest, const RouteRecord& route, SimTime now) {
    auto& list = routes_[dest];
    for (const auto& c : list) {
        if (c.route == route) {
            return;
        }
    }
    list.push_back(Cached{route, now});
}

const RouteRecord* RouteCache::best(NodeId dest) const {
    auto it = routes_.find(dest);
    if (it == routes_.end() || it->second.empty()) {
        return nullptr;
    }
    return &it->second.front().route;
}

void RouteCache::invalidate_link(NodeId a, NodeId b) {
    for (auto& [dest, list] : routes_) {
        std::erase_if(list, [a, b](const Cached& c) {
            const auto& hops = c.route.hops();
            for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
                if (hops[i] == a && hops[i + 1] == b) {
                    return true;
                }
            }
            return false;
        });
    }
}

std::size_t RouteCache::size(NodeId dest) const {
    auto it = routes_.find(dest);
    return it == routes_.end() ? 0 : it->second.size();
}

// ---------------------------------------------------------------------- Node

Node::Node(NodeId id, Role role, bool defended, NodeEnv env)
    : id_(id), role_(role), defended_(defended), env_(std::move(env)),
      suspicion_(env_.config.defense.isolation_alert_threshold) {
    detectors_.params = env_.config.detector;
}

void Node::trace_packet(const char* event, const Packet& packet, NodeId to, const char* detail) {
    if (!env_.trace.packet) {
        return;
    }
    PacketTraceEvent ev;
    ev.t = env_.engine.now();
    ev.event = event;
    ev.kind = kind_name(packet);
    ev.from = id_;
    ev.to = to;
    ev.detail = detail;
    std::visit(
        [&ev](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Rreq>) {
                ev.route = p.record;
                ev.seq = p.request_id;
            } else if constexpr (std::is_same_v<T, Rrep>) {
                ev.route = p.route;
                ev.seq = p.request_id;
            } else if constexpr (std::is_same_v<T, DataPacket>) {
                ev.route = p.source_route;
                ev.flow = p.flow;
                ev.seq = p.seq;
            } else if constexpr (std::is_same_v<T, Probe>) {
                ev.route = p.route;
                ev.seq = static_cast<std::uint32_t>(p.probe_id);
            } else if constexpr (std::is_same_v<T, ProbeAck>) {
                ev.route = p.path;
                ev.seq = static_cast<std::uint32_t>(p.probe_id);
            } else if constexpr (std::is_same_v<T, SuspicionAlert>) {
                ev.seq = p.suspect;
            }
        },
        packet);
    env_.trace.packet(ev);
}

void Node::receive(NodeId from, const Packet& packet) {
    // global invariant: every route carried by a packet is a simple path
    const RouteRecord* route = std::visit(
        [](const auto& p) -> const RouteRecord* {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Rreq>) return &p.record;
            else if constexpr (std::is_same_v<T, Rrep>) return &p.route;
            else if constexpr (std::is_same_v<T, DataPacket>) return &p.source_route;
            else if constexpr (std::is_same_v<T, Probe>) return &p.route;
            else if constexpr (std::is_same_v<T, ProbeAck>) return &p.path;
            else return nullptr;
        },
        packet);
    if (route && !route->is_simple()) {
        throw ProtocolFault("non-simple route " + route->str() + " in " + kind_name(packet) +
                            " at node " + std::to_string(id_));
    }

    std::visit(
        [this, from](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Rreq>) handle_rreq(from, p);
            else if constexpr (std::is_same_v<T, Rrep>) handle_rrep(from, p);
            else if constexpr (std::is_same_v<T, DataPacket>) handle_data(from, p);
            else if constexpr (std::is_same_v<T, Probe>) handle_probe(from, p);
            else if constexpr (std::is_same_v<T, ProbeAck>) handle_probe_ack(from, p);
            else handle_alert(from, p);
        },
        packet);
}

// ------------------------------------------------------------ route requests

std::uint32_t Node::start_discovery(NodeId target) {
    if (target == id_) {
        throw Error("start_discovery: origin equals target at node " + std::to_string(id_));
    }
    auto it = pending_.find(target);
    if (it != pending_.end()) {
        return it->second.request_id; // coalesce: one flood per target at a time
    }
    Discovery d;
    d.request_id = next_request_id_++;
    d.retries_left = env_.config.protocol.discovery_retries;
    d.started = env_.engine.now();
    auto [ins, ok] = pending_.emplace(target, std::move(d));
    flood_rreq(target, ins->second);
    return ins->second.request_id;
}

void Node::flood_rreq(NodeId target, Discovery& d) {
    Rreq rreq{id_, target, d.request_id, RouteRecord{{id_}}};
    seen_rreqs_.insert({id_, d.request_id});
    trace_packet("send", rreq, id_);
    env_.radio.transmit(id_, std::nullopt, rreq);
    const std::uint32_t request_id = d.request_id;
    env_.engine.schedule(env_.engine.now() + SimTime::from_seconds(env_.config.protocol.discovery_timeout_s),
                         EventKind::RrepWindowExpiry, static_cast<std::int32_t>(id_), request_id,
                         [this, target, request_id] { on_discovery_timeout(target, request_id); });
}

void Node::handle_rreq(NodeId from, Rreq rreq) {
    if (defended_ && suspicion_.isolated(from)) {
        trace_packet("drop", rreq, from, "isolated-sender");
        return;
    }
    const auto key = std::make_pair(rreq.origin, rreq.request_id);
    if (seen_rreqs_.count(key)) {
        return; // duplicate suppression
    }
    seen_rreqs_.insert(key);
    if (rreq.record.contains(id_)) {
        return;
    }
    if (role_ == Role::Blackhole) {
        if (id_ == rreq.target) {
            reply_as_destination(rreq); // nothing to forge when it is the true destination
        } else {
            forge_rrep(rreq);
        }
        return; // black holes never rebroadcast
    }
    if (id_ == rreq.target) {
        reply_as_destination(rreq);
        return;
    }
    if (env_.config.protocol.cached_replies && reply_from_cache(rreq)) {
        return;
    }
    rreq.record.append(id_);
    trace_packet("fwd", rreq, id_);
    env_.radio.transmit(id_, std::nullopt, rreq);
}

void Node::reply_as_destination(const Rreq& rreq) {
    RouteRecord route = rreq.record;
    route.append(id_);
    Rrep rrep{rreq.origin, rreq.target, rreq.request_id, route, id_, false, route.reversed_prefix(id_), 0};
    send_rrep(std::move(rrep));
}

bool Node::reply_from_cache(const Rreq& rreq) {
    const RouteRecord* cached = cache_.best(rreq.target);
    if (!cached) {
        return false;
    }
    RouteRecord full = rreq.record;
    full.append(id_);
    for (std::size_t i = 1; i < cached->size(); ++i) {
        full.append((*cached)[i]);
    }
    if (!full.is_simple()) {
        return false; // concatenation revisits a node; flood instead
    }
    Rrep rrep{rreq.origin, rreq.target, rreq.request_id, full, id_, true, full.reversed_prefix(id_), 0};
    send_rrep(std::move(rrep));
    return true;
}

void Node::send_rrep(Rrep rrep) {
    if (rrep.path.size() < 2) {
        return;
    }
    trace_packet("send", rrep, rrep.path[1]);
    rrep.cursor = 1;
    env_.radio.transmit(id_, rrep.path[1], rrep);
}

// ------------------------------------------------------------- route replies

void Node::handle_rrep(NodeId from, Rrep rrep) {
    if (role_ == Role::Blackhole) {
        return; // honest reverse paths never contain a black hole
    }
    if (rrep.cursor >= rrep.path.size() || rrep.path[rrep.cursor] != id_) {
        throw ProtocolFault("RREP path cursor mismatch at node " + std::to_string(id_));
    }
    if (id_ != rrep.origin) {
        // relay toward the originator
        if (defended_ && (suspicion_.isolated(from) || suspicion_.isolated(rrep.replier))) {
            trace_packet("drop", rrep, from, "isolated");
            return;
        }
        rrep.cursor += 1;
        if (rrep.cursor >= rrep.path.size()) {
            throw ProtocolFault("RREP overran its path at node " + std::to_string(id_));
        }
        trace_packet("fwd", rrep, rrep.path[rrep.cursor]);
        env_.radio.transmit(id_, rrep.path[rrep.cursor], rrep);
        return;
    }

    trace_packet("recv", rrep, from);
    rrep_log_.emplace_back(rrep.replier, env_.engine.now());
    // prune entries older than the iteration window
    const SimTime horizon =
        env_.engine.now() - SimTime::from_seconds(env_.config.defense.iteration_window_s);
    std::erase_if(rrep_log_, [horizon](const auto& e) { return e.second <= horizon; });

    if (defended_ && (suspicion_.isolated(from) || suspicion_.isolated(rrep.replier))) {
        trace_packet("drop", rrep, from, "isolated");
        return;
    }

    auto it = pending_.find(rrep.target);
    if (it == pending_.end() || it->second.request_id != rrep.request_id) {
        return; // unknown or closed discovery
    }
    if (defended_) {
        on_rrep_defended(rrep);
    } else {
        // plain DSR: first reply wins, the rest are ignored
        adopt_route(rrep.target, rrep.route);
    }
}

void Node::adopt_route(NodeId target, const RouteRecord& route) {
    cache_.add(target, route, env_.engine.now());
    pending_.erase(target);
    flush_buffer(target);
}

// -------------------------------------------------------------- data packets

void Node::send_data(FlowId flow, std::uint32_t seq, NodeId dest, std::uint32_t payload_bytes) {
    env_.ledger.record_send(flow, seq, env_.engine.now(), payload_bytes);
    DataPacket pkt;
    pkt.flow = flow;
    pkt.seq = seq;
    pkt.payload_bytes = payload_bytes;
    pkt.created_at = env_.engine.now();

    const RouteRecord* route = cache_.best(dest);
    if (route) {
        pkt.source_route = *route;
        pkt.cursor = 0;
        trace_packet("send", pkt, dest);
        transmit_data(std::move(pkt));
        return;
    }
    if (buffer_.size() >= env_.config.protocol.send_buffer_limit) {
        env_.ledger.record_drop(flow, seq, env_.engine.now(), DropCause::Buffer);
        trace_packet("drop", pkt, dest, "send-buffer overflow");
        // a full buffer still means we want a route
        if (!pending_.count(dest)) {
            start_discovery(dest);
        }
        return;
    }
    buffer_.push_back(BufferedPacket{dest, std::move(pkt)});
    if (!pending_.count(dest)) {
        start_discovery(dest);
    }
}

void Node::transmit_data(DataPacket pkt) {
    if (pkt.source_route.empty() || pkt.source_route[pkt.cursor] != id_) {
        throw ProtocolFault("data cursor mismatch when transmitting at node " + std::to_string(id_));
    }
    const NodeId next = pkt.source_route[pkt.cursor + 1];
    if (!env_.radio.in_range(id_, next, env_.engine.now())) {
        env_.ledger.record_drop(pkt.flow, pkt.seq, env_.engine.now(), DropCause::Link);
        trace_packet("drop", pkt, next, "link breakage");
        invalidate_link(id_, next);
        if (pkt.source_route.front() != id_) {
            env_.invalidate_remote(pkt.source_route.front(), id_, next);
        }
        return;
    }
    pkt.cursor += 1;
    const auto scheduled = env_.radio.transmit(id_, next, pkt);
    if (!scheduled) {
        env_.ledger.record_drop(pkt.flow, pkt.seq, env_.engine.now(), DropCause::Buffer);
        trace_packet("drop", pkt, next, "outbound queue full");
    }
}

void Node::handle_data(NodeId from, DataPacket pkt) {
    if (role_ == Role::Blackhole) {
        sink_packet(pkt);
        return;
    }
    if (pkt.cursor >= pkt.source_route.size() || pkt.source_route[pkt.cursor] != id_) {
        throw ProtocolFault("data cursor mismatch at node " + std::to_string(id_) + " route " +
                            pkt.source_route.str());
    }
    if (pkt.cursor + 1 == pkt.source_route.size()) {
        env_.ledger.record_receive(pkt.flow, pkt.seq, env_.engine.now());
        trace_packet("recv", pkt, from);
        return;
    }
    trace_packet("fwd", pkt, pkt.source_route[pkt.cursor + 1]);
    transmit_data(std::move(pkt));
}

void Node::invalidate_link(NodeId a, NodeId b) { cache_.invalidate_link(a, b); }

void Node::flush_buffer(NodeId target) {
    std::deque<BufferedPacket> rest;
    bool need_rediscovery = false;
    for (auto& b : buffer_) {
        if (b.dest != target) {
            rest.push_back(std::move(b));
            continue;
        }
        const RouteRecord* route = cache_.best(target);
        if (!route) {
            need_rediscovery = true;
            rest.push_back(std::move(b));
            continue;
        }
        b.packet.source_route = *route;
        b.packet.cursor = 0;
        trace_packet("send", b.packet, target, "flushed");
        transmit_data(std::move(b.packet));
    }
    buffer_ = std::move(rest);
    if (need_rediscovery && !pending_.count(target)) {
        start_discovery(target);
    }
}

void Node::fail_discovery(NodeId target) {
    pending_.erase(target);
    std::deque<BufferedPacket> rest;
    for (auto& b : buffer_) {
        if (b.dest != target) {
            rest.push_back(std::move(b));
            continue;
        }
        env_.ledger.record_drop(b.packet.flow, b.packet.seq, env_.engine.now(), DropCause::NoRoute);
        trace_packet("drop", b.packet, target, "discovery failed");
    }
    buffer_ = std::move(rest);
}

void Node::on_discovery_timeout(NodeId target, std::uint32_t request_id) {
    auto it = pending_.find(target);
    if (it == pending_.end() || it->second.request_id != request_id) {
        return; // superseded or completed
    }
    Discovery& d = it->second;
    if (d.window_open || d.probing) {
        return; // replies arrived; the collection path owns completion now
    }
    if (d.retries_left > 0) {
        d.retries_left -= 1;
        d.request_id = next_request_id_++;
        d.started = env_.engine.now();
        d.candidates.clear();
        flood_rreq(target, d);
        return;
    }
    fail_discovery(target);
}

void Node::mark_end_buffered() {
    for (const auto& b : buffer_) {
        env_.ledger.mark_end_buffered(b.packet.flow, b.packet.seq);
    }
}

// ----------------------------------------------------------------- adversary

void Node::forge_rrep(const Rreq& rreq) {
    RouteRecord route = rreq.record;
    route.append(id_);
    route.append(rreq.target);
    if (!route.is_simple()) {
        return;
    }
    // claim one-hop adjacency to the target, skip any cache lookup, answer at once
    Rrep rrep{rreq.origin, rreq.target, rreq.request_id, route, id_, false, route.reversed_prefix(id_), 0};
    const double delay = env_.config.attack.reply_delay_s;
    if (delay <= 0) {
        send_rrep(std::move(rrep));
        return;
    }
    env_.engine.schedule(env_.engine.now() + SimTime::from_seconds(delay), EventKind::PacketDelivery,
                         static_cast<std::int32_t>(id_), rreq.request_id,
                         [this, rrep = std::move(rrep)]() mutable { send_rrep(std::move(rrep)); });
}

void Node::sink_packet(const Packet& packet) {
    if (const auto* d = std::get_if<DataPacket>(&packet)) {
        sink_.data += 1;
        env_.ledger.record_drop(d->flow, d->seq, env_.engine.now(), DropCause::Blackhole);
        trace_packet("drop", packet, id_, "blackhole sink");
        return;
    }
    if (const auto* p = std::get_if<Probe>(&packet)) {
        sink_.probes += 1;
        env_.ledger.record_drop(probe_flow_id(p->origin), static_cast<std::uint32_t>(p->probe_id),
                                env_.engine.now(), DropCause::Blackhole);
        trace_packet("drop", packet, id_, "blackhole sink");
    }
}

// -------------------------------------------------------------------- probes

void Node::handle_probe(NodeId from, Probe probe) {
    if (role_ == Role::Blackhole) {
        sink_packet(probe);
        return;
    }
    if (probe.cursor >= probe.route.size() || probe.route[probe.cursor] != id_) {
        throw ProtocolFault("probe cursor mismatch at node " + std::to_string(id_));
    }
    if (probe.cursor + 1 == probe.route.size()) {
        // destination: confirm along the reversed route
        trace_packet("recv", probe, from);
        ProbeAck ack{probe.probe_id, probe.origin, probe.route.reversed(), 0};
        const NodeId next = ack.path[1];
        if (env_.radio.in_range(id_, next, env_.engine.now())) {
            ack.cursor = 1;
            trace_packet("send", ack, next);
            env_.radio.transmit(id_, next, ack);
        }
        return;
    }
    const NodeId next = probe.route[probe.cursor + 1];
    if (!env_.radio.in_range(id_, next, env_.engine.now())) {
        env_.ledger.record_drop(probe_flow_id(probe.origin), static_cast<std::uint32_t>(probe.probe_id),
                                env_.engine.now(), DropCause::Link);
        trace_packet("drop", probe, next, "link breakage");
        invalidate_link(id_, next);
        return;
    }
    probe.cursor += 1;
    trace_packet("fwd", probe, next);
    env_.radio.transmit(id_, next, probe);
}

void Node::handle_probe_ack(NodeId from, ProbeAck ack) {
    if (role_ == Role::Blackhole) {
        return;
    }
    if (ack.cursor >= ack.path.size() || ack.path[ack.cursor] != id_) {
        throw ProtocolFault("probe-ack cursor mismatch at node " + std::to_string(id_));
    }
    if (ack.cursor + 1 < ack.path.size()) {
        const NodeId next = ack.path[ack.cursor + 1];
        if (!env_.radio.in_range(id_, next, env_.engine.now())) {
            trace_packet("drop", ack, next, "link breakage");
            return; // the origin's probe timeout covers this
        }
        ack.cursor += 1;
        trace_packet("fwd", ack, next);
        env_.radio.transmit(id_, next, ack);
        return;
    }
    // back at the probing origin
    auto it = probes_in_flight_.find(ack.probe_id);
    if (it == probes_in_flight_.end()) {
        trace_packet("drop", ack, from, "stale ack");
        return; // already timed out
    }
    const auto [target, request_id, idx] = it->second;
    probes_in_flight_.erase(it);
    env_.ledger.record_receive(probe_flow_id(id_), static_cast<std::uint32_t>(ack.probe_id),
                               env_.engine.now());
    trace_packet("recv", ack, from);
    probe_resolved(target, request_id, idx, true);
}

void Node::issue_probe(NodeId target, std::uint32_t request_id, std::size_t cand_idx) {
    auto it = pending_.find(target);
    if (it == pending_.end() || it->second.request_id != request_id) {
        return;
    }
    CandidateState& cand = it->second.candidates[cand_idx];
    const std::uint64_t probe_id = next_probe_id_++;
    probes_in_flight_[probe_id] = {target, request_id, cand_idx};
    cand.active_probe = probe_id;
    cand.probes_sent += 1;

    const int hops = cand.info.hop_count;
    const double timeout_s = std::max(env_.config.defense.probe_timeout_floor_s,
                                      env_.config.defense.probe_timeout_per_hop_s * hops);
    const SimTime deadline = env_.engine.now() + SimTime::from_seconds(timeout_s);
    Probe probe{probe_id, id_, cand.info.route, 0, env_.engine.now(), deadline};
    env_.ledger.record_send(probe_flow_id(id_), static_cast<std::uint32_t>(probe_id), env_.engine.now(),
                            32, /*control=*/true);
    trace_packet("send", probe, target);

    env_.engine.schedule(deadline, EventKind::ProbeTimeout, static_cast<std::int32_t>(id_), probe_id,
                         [this, probe_id] { on_probe_timeout(probe_id); });

    const NodeId next = probe.route[1];
    if (!env_.radio.in_range(id_, next, env_.engine.now())) {
        env_.ledger.record_drop(probe_flow_id(id_), static_cast<std::uint32_t>(probe_id),
                                env_.engine.now(), DropCause::Link);
        trace_packet("drop", probe, next, "link breakage");
        return; // the timeout converts this into a failure observation
    }
    probe.cursor = 1;
    env_.radio.transmit(id_, next, probe);
}

void Node::on_probe_timeout(std::uint64_t probe_id) {
    auto it = probes_in_flight_.find(probe_id);
    if (it == probes_in_flight_.end()) {
        return; // confirmed before the deadline
    }
    const auto [target, request_id, idx] = it->second;
    probes_in_flight_.erase(it);
    probe_resolved(target, request_id, idx, false);
}

void Node::probe_resolved(NodeId target, std::uint32_t request_id, std::size_t cand_idx, bool success) {
    auto it = pending_.find(target);
    if (it == pending_.end() || it->second.request_id != request_id) {
        return;
    }
    Discovery& d = it->second;
    CandidateState& cand = d.candidates[cand_idx];
    cand.active_probe = 0;
    if (success) {
        cand.info.probe_successes += 1;
    } else {
        cand.info.probe_failures += 1;
    }
    if (!cand.done()) {
        issue_probe(target, request_id, cand_idx);
        return;
    }
    const bool all_done = std::all_of(d.candidates.begin(), d.candidates.end(),
                                      [](const CandidateState& c) { return c.done(); });
    if (all_done) {
        finish_selection(target, d);
    }
}

// ----------------------------------------------------------- defended source

void Node::on_rrep_defended(const Rrep& rrep) {
    auto it = pending_.find(rrep.target);
    Discovery& d = it->second;
    if (d.probing) {
        return; // collection closed; late replies no longer become candidates
    }
    for (const auto& c : d.candidates) {
        if (c.info.route == rrep.route) {
            return; // identical route reported twice
        }
    }
    if (!d.window_open) {
        d.window_open = true;
        const NodeId target = rrep.target;
        const std::uint32_t request_id = rrep.request_id;
        env_.engine.schedule(
            env_.engine.now() + SimTime::from_seconds(env_.config.defense.rrep_window_s),
            EventKind::RrepWindowExpiry, static_cast<std::int32_t>(id_), request_id,
            [this, target, request_id] { on_collection_closed(target, request_id); });
    }
    CandidateState cand;
    cand.info.route = rrep.route;
    cand.info.replier = rrep.replier;
    cand.info.hop_count = static_cast<int>(rrep.route.size()) - 1;
    cand.info.replier_claims_cached = rrep.replier_claims_cached;
    d.candidates.push_back(std::move(cand));
}

void Node::on_collection_closed(NodeId target, std::uint32_t request_id) {
    auto it = pending_.find(target);
    if (it == pending_.end() || it->second.request_id != request_id || it->second.probing) {
        return;
    }
    Discovery& d = it->second;
    d.window_open = false;
    d.probing = true;
    const SimTime now = env_.engine.now();
    const SimTime window = SimTime::from_seconds(env_.config.defense.iteration_window_s);
    for (auto& c : d.candidates) {
        c.info.replier_rrep_iterations =
            std::max(1, rrep_iteration_count(rrep_log_, c.info.replier, now, window));
    }
    for (std::size_t i = 0; i < d.candidates.size(); ++i) {
        issue_probe(target, request_id, i);
    }
}

void Node::harvest_self_pattern(const FeatureVec& pattern) {
    self_patterns_.push_back(pattern);
    if (self_patterns_.size() > env_.config.defense.self_pattern_pool) {
        self_patterns_.erase(self_patterns_.begin());
    }
    ++harvested_total_;
    const bool due = !detectors_trained_
                         ? self_patterns_.size() >= 4
                         : harvested_total_ - trained_marker_ >= env_.config.defense.retrain_interval;
    if (due) {
        detectors_ = train_detectors(self_patterns_, env_.config.detector, env_.ais_rng);
        detectors_trained_ = true;
        trained_marker_ = harvested_total_;
    }
}

bool Node::route_blocked(const RouteRecord& route) const {
    for (NodeId n : route.hops()) {
        if (suspicion_.isolated(n)) {
            return true;
        }
    }
    return false;
}

void Node::raise_alert_and_isolate(NodeId suspect) {
    if (suspect == id_) {
        return;
    }
    suspicion_.record_direct(suspect, env_.engine.now());
    if (!alerted_.count(suspect)) {
        alerted_.insert(suspect);
        SuspicionAlert alert{id_, suspect, false};
        trace_packet("send", alert, id_);
        env_.radio.transmit(id_, std::nullopt, alert);
    }
}

void Node::handle_alert(NodeId from, SuspicionAlert alert) {
    if (role_ == Role::Blackhole || !defended_) {
        return;
    }
    if (alert.suspect == id_) {
        return;
    }
    const auto key = std::make_pair(alert.accuser, alert.suspect);
    if (seen_alerts_.count(key)) {
        return;
    }
    seen_alerts_.insert(key);
    trace_packet("recv", alert, from);
    suspicion_.record_alert(alert.suspect, alert.accuser, env_.engine.now());
    if (env_.config.defense.alert_flood) {
        alert.flooded = true;
        trace_packet("fwd", alert, id_);
        env_.radio.transmit(id_, std::nullopt, alert);
    }
}

void Node::finish_selection(NodeId target, Discovery& d) {
    std::vector<RouteCandidate> cands;
    cands.reserve(d.candidates.size());
    for (const auto& c : d.candidates) {
        cands.push_back(c.info);
    }
    score_candidates(cands);

    int max_hop = 1;
    for (const auto& c : cands) {
        max_hop = std::max(max_hop, c.hop_count);
    }

    DefenseTraceEvent ev;
    ev.t = env_.engine.now();
    ev.origin = id_;
    ev.discovery = d.request_id;

    for (const auto& c : cands) {
        const FeatureVec features = candidate_features(c, max_hop);
        if (c.p_bh == 0.0) {
            harvest_self_pattern(features);
        } else if (detectors_trained_) {
            // advisory verdict; rejection authority stays with the p_bh rule
            const auto verdict = classify_pattern(detectors_, features);
            if (!verdict.matched_self) {
                suspicion_.record_advisory(c.replier, env_.engine.now());
            }
        }
        if (c.p_bh >= 1.0) {
            raise_alert_and_isolate(c.replier);
            ev.alerts.push_back(c.replier);
        }
    }

    const auto chosen = select_route(cands, [this](const RouteRecord& r) { return route_blocked(r); });
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (!chosen || i != *chosen) {
            ev.rejected.push_back(cands[i].route);
        }
    }
    ev.candidates = cands;
    if (chosen) {
        ev.chosen = cands[*chosen].route;
    }
    if (env_.trace.defense) {
        env_.trace.defense(ev);
    }

    if (chosen) {
        adopt_route(target, cands[*chosen].route);
        return;
    }
    // every candidate rejected: retry like an unanswered discovery
    if (d.retries_left > 0) {
        d.retries_left -= 1;
        d.request_id = next_request_id_++;
        d.started = env_.engine.now();
        d.window_open = false;
        d.probing = false;
        d.candidates.clear();
        flood_rreq(target, d);
        return;
    }
    fail_discovery(target);
}

} // namespace manetsim
