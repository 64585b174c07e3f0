#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "manetsim/time.hpp"

namespace manetsim {

using NodeId = std::uint32_t;
using FlowId = std::uint32_t;

/// Ordered list of node ids forming a simple path. This is the currency of
/// DSR: accumulated in route requests, echoed in replies, carried in every
/// source-routed packet.
class RouteRecord {
public:
    RouteRecord() = default;
    explicit RouteRecord(std::vector<NodeId> hops) : hops_(std::move(hops)) {}

    const std::vector<NodeId>& hops() const { return hops_; }
    std::size_t size() const { return hops_.size(); }
    bool empty() const { return hops_.empty(); }
    NodeId operator[](std::size_t i) const { return hops_[i]; }
    NodeId front() const { return hops_.front(); }
    NodeId back() const { return hops_.back(); }

    void append(NodeId n) { hops_.push_back(n); }

    bool contains(NodeId n) const { return std::find(hops_.begin(), hops_.end(), n) != hops_.end(); }

    /// True when no node appears twice.
    bool is_simple() const {
        for (std::size_t i = 0; i < hops_.size(); ++i) {
            for (std::size_t j = i + 1; j < hops_.size(); ++j) {
                if (hops_[i] == hops_[j]) {
                    return false;
                }
            }
        }
        return true;
    }

    RouteRecord reversed() const {
        std::vector<NodeId> r(hops_.rbegin(), hops_.rend());
        return RouteRecord{std::move(r)};
    }

    /// Reverse of the prefix ending at `upto` (inclusive); the transport path
    /// an RREP takes from its replier back to the originator.
    RouteRecord reversed_prefix(NodeId upto) const {
        std::vector<NodeId> r;
        auto it = std::find(hops_.begin(), hops_.end(), upto);
        for (auto rit = std::make_reverse_iterator(it == hops_.end() ? hops_.end() : it + 1);
             rit != hops_.rend(); ++rit) {
            r.push_back(*rit);
        }
        return RouteRecord{std::move(r)};
    }

    auto operator<=>(const RouteRecord&) const = default;

    std::string str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < hops_.size(); ++i) {
            if (i) s += " ";
            s += std::to_string(hops_[i]);
        }
        return s + "]";
    }

private:
    std::vector<NodeId> hops_;
};

struct Rreq {
    NodeId origin = 0;
    NodeId target = 0;
    std::uint32_t request_id = 0;
    RouteRecord record; // starts at origin, grows hop by hop
};

struct Rrep {
    NodeId origin = 0;
    NodeId target = 0;
    std::uint32_t request_id = 0;
    RouteRecord route; // full claimed route origin..target
    NodeId replier = 0;
    bool replier_claims_cached = false;
    RouteRecord path;          // transport path replier -> origin
    std::uint32_t cursor = 0;  // index of current holder within path
};

struct DataPacket {
    FlowId flow = 0;
    std::uint32_t seq = 0;
    RouteRecord source_route;
    std::uint32_t cursor = 0; // index of current holder within source_route
    std::uint32_t payload_bytes = 512;
    SimTime created_at;
};

struct Probe {
    std::uint64_t probe_id = 0;
    NodeId origin = 0;
    RouteRecord route;
    std::uint32_t cursor = 0;
    SimTime issued_at;
    SimTime timeout_at; // strictly after issued_at
};

struct ProbeAck {
    std::uint64_t probe_id = 0;
    NodeId origin = 0;
    RouteRecord path; // reversed probe route, destination -> origin
    std::uint32_t cursor = 0;
};

struct SuspicionAlert {
    NodeId accuser = 0;
    NodeId suspect = 0;
    bool flooded = false; // set when relayed under network-wide flooding
};

using Packet = std::variant<Rreq, Rrep, DataPacket, Probe, ProbeAck, SuspicionAlert>;

inline const char* kind_name(const Packet& p) {
    switch (p.index()) {
    case 0: return "RREQ";
    case 1: return "RREP";
    case 2: return "DATA";
    case 3: return "PROBE";
    case 4: return "PROBE-ACK";
    case 5: return "SUSPICION-ALERT";
    }
    return "?";
}

inline bool is_data(const Packet& p) { return std::holds_alternative<DataPacket>(p); }

} // namespace manetsim
