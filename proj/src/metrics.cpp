#include "manetsim/metrics.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "manetsim/error.hpp"

namespace manetsim {

const char* to_string(DropCause cause) {
    switch (cause) {
    case DropCause::Blackhole: return "blackhole";
    case DropCause::Link: return "link";
    case DropCause::Buffer: return "buffer";
    case DropCause::NoRoute: return "no-route";
    }
    return "?";
}

namespace {
DropCause cause_from_string(const std::string& s) {
    if (s == "blackhole") return DropCause::Blackhole;
    if (s == "link") return DropCause::Link;
    if (s == "buffer") return DropCause::Buffer;
    if (s == "no-route") return DropCause::NoRoute;
    throw LedgerFault("unknown drop cause '" + s + "' in import");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}
} // namespace

void MetricsLedger::record_send(FlowId flow, std::uint32_t seq, SimTime t, std::uint32_t bytes,
                                bool control) {
    auto key = std::make_pair(flow, seq);
    if (entries_.count(key)) {
        throw LedgerFault("duplicate send for flow " + std::to_string(flow) + " seq " + std::to_string(seq));
    }
    auto last = last_send_.find(flow);
    if (last != last_send_.end() && t < last->second) {
        throw LedgerFault("send times must be non-decreasing within flow " + std::to_string(flow));
    }
    last_send_[flow] = t;
    entries_.emplace(key, Entry{State::Sent, t, bytes, control});
    sends_.push_back(SendEvent{flow, seq, t, bytes, control});
    if (!control) {
        ++data_sends_;
    }
}

MetricsLedger::Entry& MetricsLedger::entry_for(FlowId flow, std::uint32_t seq, const char* action) {
    auto it = entries_.find(std::make_pair(flow, seq));
    if (it == entries_.end()) {
        throw LedgerFault(std::string(action) + " without matching send: flow " + std::to_string(flow) +
                          " seq " + std::to_string(seq));
    }
    if (it->second.state != State::Sent) {
        throw LedgerFault(std::string(action) + " after terminal event: flow " + std::to_string(flow) +
                          " seq " + std::to_string(seq));
    }
    return it->second;
}

void MetricsLedger::record_receive(FlowId flow, std::uint32_t seq, SimTime t) {
    Entry& e = entry_for(flow, seq, "receive");
    e.state = State::Received;
    receives_.push_back(RecvEvent{flow, seq, t});
    if (!e.control) {
        ++data_receives_;
        data_received_bytes_ += e.bytes;
        delay_sum_ms_ += (t - e.sent_at).millis();
    }
}

void MetricsLedger::record_drop(FlowId flow, std::uint32_t seq, SimTime t, DropCause cause) {
    Entry& e = entry_for(flow, seq, "drop");
    e.state = State::Dropped;
    drops_.push_back(DropEvent{flow, seq, t, cause});
    if (!e.control) {
        ++data_drops_;
        ++drops_by_cause_[static_cast<int>(cause)];
    } else {
        ++control_drops_by_cause_[static_cast<int>(cause)];
    }
}

void MetricsLedger::mark_end_buffered(FlowId flow, std::uint32_t seq) {
    Entry& e = entry_for(flow, seq, "end-buffer mark");
    e.state = State::EndBuffered;
    if (!e.control) {
        ++end_buffered_;
    }
}

std::uint64_t MetricsLedger::dropped_by_cause(DropCause cause) const {
    return drops_by_cause_[static_cast<int>(cause)];
}

std::uint64_t MetricsLedger::control_drops_by_cause(DropCause cause) const {
    return control_drops_by_cause_[static_cast<int>(cause)];
}

std::uint64_t MetricsLedger::in_flight() const {
    const std::uint64_t resolved = data_receives_ + data_drops_ + end_buffered_;
    if (resolved > data_sends_) {
        throw LedgerFault("more resolutions than sends");
    }
    return data_sends_ - resolved;
}

void MetricsLedger::export_jsonl(std::ostream& os) const {
    using nlohmann::json;
    for (const auto& s : sends_) {
        os << json{{"ev", "send"}, {"flow", s.flow}, {"seq", s.seq}, {"t", s.t.us()},
                   {"bytes", s.bytes}, {"control", s.control}}
                  .dump()
           << "\n";
    }
    for (const auto& r : receives_) {
        os << json{{"ev", "recv"}, {"flow", r.flow}, {"seq", r.seq}, {"t", r.t.us()}}.dump() << "\n";
    }
    for (const auto& d : drops_) {
        os << json{{"ev", "drop"}, {"flow", d.flow}, {"seq", d.seq}, {"t", d.t.us()},
                   {"cause", to_string(d.cause)}}
                  .dump()
           << "\n";
    }
    for (const auto& [key, e] : entries_) {
        if (e.state == State::EndBuffered) {
            os << json{{"ev", "end-buffered"}, {"flow", key.first}, {"seq", key.second}}.dump() << "\n";
        }
    }
}

MetricsLedger MetricsLedger::import_jsonl(std::istream& is) {
    using nlohmann::json;
    MetricsLedger ledger;
    // terminal events may precede their send in file order only for distinct
    // flows; replay sends first, then the rest, to stay integrity-clean.
    std::vector<json> terminal;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        json j = json::parse(line);
        const std::string ev = j.at("ev");
        if (ev == "send") {
            ledger.record_send(j.at("flow"), j.at("seq"), SimTime::from_us(j.at("t")), j.at("bytes"),
                               j.at("control"));
        } else {
            terminal.push_back(std::move(j));
        }
    }
    for (const auto& j : terminal) {
        const std::string ev = j.at("ev");
        if (ev == "recv") {
            ledger.record_receive(j.at("flow"), j.at("seq"), SimTime::from_us(j.at("t")));
        } else if (ev == "drop") {
            ledger.record_drop(j.at("flow"), j.at("seq"), SimTime::from_us(j.at("t")),
                               cause_from_string(j.at("cause")));
        } else if (ev == "end-buffered") {
            ledger.mark_end_buffered(j.at("flow"), j.at("seq"));
        } else {
            throw LedgerFault("unknown event '" + ev + "' in import");
        }
    }
    return ledger;
}

ThroughputResult throughput(const MetricsLedger& ledger, double duration_s, bool strict_loss) {
    if (duration_s <= 0) {
        throw Error("throughput: duration must be positive");
    }
    ThroughputResult r;
    const std::uint64_t base = strict_loss ? ledger.originated()
                                           : ledger.originated() - ledger.end_buffered();
    if (base > 0) {
        r.pdr = static_cast<double>(ledger.received()) / static_cast<double>(base);
    }
    r.throughput_bps = static_cast<double>(ledger.received_bytes()) * 8.0 / duration_s;
    return r;
}

std::optional<double> avg_end_to_end_delay_ms(const MetricsLedger& ledger) {
    if (ledger.received() == 0) {
        return std::nullopt;
    }
    double sum = 0;
    // recompute from raw events rather than trusting a running sum
    std::map<std::pair<FlowId, std::uint32_t>, SimTime> sent_at;
    std::map<std::pair<FlowId, std::uint32_t>, bool> control;
    for (const auto& s : ledger.sends()) {
        sent_at[{s.flow, s.seq}] = s.t;
        control[{s.flow, s.seq}] = s.control;
    }
    std::uint64_t n = 0;
    for (const auto& r : ledger.receives()) {
        if (control[{r.flow, r.seq}]) {
            continue;
        }
        sum += (r.t - sent_at[{r.flow, r.seq}]).millis();
        ++n;
    }
    return sum / static_cast<double>(n);
}

std::optional<double> packet_loss_ratio_percent(const MetricsLedger& ledger, bool strict_loss) {
    const std::uint64_t base = strict_loss ? ledger.originated()
                                           : ledger.originated() - ledger.end_buffered();
    if (base == 0) {
        return std::nullopt;
    }
    return (static_cast<double>(base) - static_cast<double>(ledger.received())) /
           static_cast<double>(base) * 100.0;
}

std::optional<double> drop_packet_ratio_percent(const MetricsLedger& ledger) {
    const std::uint64_t dropped = ledger.dropped();
    const std::uint64_t sent = ledger.originated();
    if (dropped + sent == 0) {
        return std::nullopt;
    }
    return static_cast<double>(dropped) / static_cast<double>(dropped + sent) * 100.0;
}

MetricsReport build_report(const MetricsLedger& ledger, double duration_s,
                           std::uint64_t control_overhead, bool strict_loss) {
    MetricsReport rep;
    const auto tp = throughput(ledger, duration_s, strict_loss);
    rep.pdr = tp.pdr;
    rep.throughput_bps = tp.throughput_bps;
    rep.avg_delay_ms = avg_end_to_end_delay_ms(ledger);
    rep.plr_percent = packet_loss_ratio_percent(ledger, strict_loss);
    rep.dpr_percent = drop_packet_ratio_percent(ledger);
    rep.control_overhead_packets = control_overhead;
    rep.originated = ledger.originated();
    rep.received = ledger.received();
    rep.dropped_blackhole = ledger.dropped_by_cause(DropCause::Blackhole);
    rep.dropped_link = ledger.dropped_by_cause(DropCause::Link);
    rep.dropped_buffer = ledger.dropped_by_cause(DropCause::Buffer);
    rep.dropped_no_route = ledger.dropped_by_cause(DropCause::NoRoute);
    rep.end_buffered = ledger.end_buffered();
    rep.in_flight = ledger.in_flight();
    return rep;
}

std::string report_text(const MetricsReport& r) {
    std::string out;
    auto line = [&out](const std::string& key, const std::string& value) {
        out += key;
        out.append(key.size() < 22 ? 22 - key.size() : 1, ' ');
        out += "= " + value + "\n";
    };
    line("originated", std::to_string(r.originated));
    line("received", std::to_string(r.received));
    line("dropped_blackhole", std::to_string(r.dropped_blackhole));
    line("dropped_link", std::to_string(r.dropped_link));
    line("dropped_buffer", std::to_string(r.dropped_buffer));
    line("dropped_no_route", std::to_string(r.dropped_no_route));
    line("end_buffered", std::to_string(r.end_buffered));
    line("in_flight", std::to_string(r.in_flight));
    line("pdr", r.pdr ? fmt(*r.pdr) : "n/a");
    line("throughput_bps", r.throughput_bps ? fmt(*r.throughput_bps) : "n/a");
    line("avg_delay_ms", r.avg_delay_ms ? fmt(*r.avg_delay_ms) : "n/a");
    line("plr_percent", r.plr_percent ? fmt(*r.plr_percent) : "n/a");
    line("dpr_percent", r.dpr_percent ? fmt(*r.dpr_percent) : "n/a");
    line("control_overhead", std::to_string(r.control_overhead_packets));
    return out;
}

} // namespace manetsim
