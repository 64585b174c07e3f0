#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manetsim/packet.hpp"
#include "manetsim/time.hpp"

namespace manetsim {

enum class DropCause : std::uint8_t { Blackhole, Link, Buffer, NoRoute };

const char* to_string(DropCause cause);

/// Append-only event log from which every evaluation metric is computed.
/// Data packets and control packets (probes) share the log; control entries
/// are excluded from the four data metrics and surface only as overhead.
/// Integrity is enforced: a receive or drop without a matching send, or a
/// second terminal event for the same (flow, seq), is a simulation bug.
class MetricsLedger {
public:
    struct SendEvent {
        FlowId flow;
        std::uint32_t seq;
        SimTime t;
        std::uint32_t bytes;
        bool control;
    };
    struct RecvEvent {
        FlowId flow;
        std::uint32_t seq;
        SimTime t;
    };
    struct DropEvent {
        FlowId flow;
        std::uint32_t seq;
        SimTime t;
        DropCause cause;
    };

    void record_send(FlowId flow, std::uint32_t seq, SimTime t, std::uint32_t bytes, bool control = false);
    void record_receive(FlowId flow, std::uint32_t seq, SimTime t);
    void record_drop(FlowId flow, std::uint32_t seq, SimTime t, DropCause cause);

    /// Mark a packet still sitting in a send buffer when the run ended.
    void mark_end_buffered(FlowId flow, std::uint32_t seq);

    // data-packet tallies (control excluded)
    std::uint64_t originated() const { return data_sends_; }
    std::uint64_t received() const { return data_receives_; }
    std::uint64_t dropped() const { return data_drops_; }
    std::uint64_t dropped_by_cause(DropCause cause) const;
    std::uint64_t end_buffered() const { return end_buffered_; }
    std::uint64_t received_bytes() const { return data_received_bytes_; }
    /// originated - received - dropped - end_buffered; never negative.
    std::uint64_t in_flight() const;

    std::uint64_t control_drops_by_cause(DropCause cause) const;

    const std::vector<SendEvent>& sends() const { return sends_; }
    const std::vector<RecvEvent>& receives() const { return receives_; }
    const std::vector<DropEvent>& drops() const { return drops_; }

    /// JSON-lines export/import; importing an export reproduces the ledger
    /// (and hence every metric) exactly.
    void export_jsonl(std::ostream& os) const;
    static MetricsLedger import_jsonl(std::istream& is);

private:
    enum class State : std::uint8_t { Sent, Received, Dropped, EndBuffered };
    struct Entry {
        State state;
        SimTime sent_at;
        std::uint32_t bytes;
        bool control;
    };

    Entry& entry_for(FlowId flow, std::uint32_t seq, const char* action);

    std::map<std::pair<FlowId, std::uint32_t>, Entry> entries_;
    std::map<FlowId, SimTime> last_send_;
    std::vector<SendEvent> sends_;
    std::vector<RecvEvent> receives_;
    std::vector<DropEvent> drops_;
    std::uint64_t data_sends_ = 0;
    std::uint64_t data_receives_ = 0;
    std::uint64_t data_drops_ = 0;
    std::uint64_t data_received_bytes_ = 0;
    std::uint64_t end_buffered_ = 0;
    std::uint64_t drops_by_cause_[4] = {0, 0, 0, 0};
    std::uint64_t control_drops_by_cause_[4] = {0, 0, 0, 0};
    double delay_sum_ms_ = 0;
};

struct ThroughputResult {
    std::optional<double> pdr; // received / originated; absent when nothing originated
    double throughput_bps = 0; // received bytes * 8 / duration
};

/// Received/originated ratio plus bits-per-second, over data packets.
/// `strict_loss` counts packets still buffered at the end as lost; otherwise
/// they are excluded from both numerator bases.
ThroughputResult throughput(const MetricsLedger& ledger, double duration_s, bool strict_loss = false);

/// Mean (receive - send) over delivered data packets, in milliseconds.
std::optional<double> avg_end_to_end_delay_ms(const MetricsLedger& ledger);

/// Percentage of data packets lost relative to packets sent. Complements the
/// delivery ratio exactly: pdr + plr/100 == 1.
std::optional<double> packet_loss_ratio_percent(const MetricsLedger& ledger, bool strict_loss = false);

/// dropped / (dropped + sent) * 100 over data packets.
std::optional<double> drop_packet_ratio_percent(const MetricsLedger& ledger);

struct MetricsReport {
    std::optional<double> pdr;
    std::optional<double> throughput_bps;
    std::optional<double> avg_delay_ms;
    std::optional<double> plr_percent;
    std::optional<double> dpr_percent;
    std::uint64_t control_overhead_packets = 0;
    std::uint64_t originated = 0;
    std::uint64_t received = 0;
    std::uint64_t dropped_blackhole = 0;
    std::uint64_t dropped_link = 0;
    std::uint64_t dropped_buffer = 0;
    std::uint64_t dropped_no_route = 0;
    std::uint64_t end_buffered = 0;
    std::uint64_t in_flight = 0;
};

MetricsReport build_report(const MetricsLedger& ledger, double duration_s,
                           std::uint64_t control_overhead, bool strict_loss = false);

/// Flat key = value block (report.txt body).
std::string report_text(const MetricsReport& report);

} // namespace manetsim
