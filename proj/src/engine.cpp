#include "manetsim/engine.hpp"

#include <string>

#include "manetsim/error.hpp"

namespace manetsim {

const char* to_string(EventKind kind) {
    switch (kind) {
    case EventKind::PacketDelivery: return "packet-delivery";
    case EventKind::MobilityWaypoint: return "mobility-waypoint";
    case EventKind::ProbeTimeout: return "probe-timeout";
    case EventKind::RrepWindowExpiry: return "rrep-window-expiry";
    case EventKind::TrafficTick: return "traffic-tick";
    case EventKind::MetricSnapshot: return "metric-snapshot";
    }
    return "unknown";
}

EventHandle Engine::schedule(SimTime fire_at, EventKind kind, std::int32_t node, std::uint64_t detail,
                             std::function<void()> action) {
    if (fire_at < clock_) {
        throw ScheduleError("event at t=" + std::to_string(fire_at.us()) + "us is before clock t=" +
                            std::to_string(clock_.us()) + "us");
    }
    const std::uint64_t seq = next_seq_++;
    Event ev{fire_at, seq, kind, node, detail, std::move(action)};
    queue_.emplace(Key{fire_at, seq}, std::move(ev));
    return EventHandle{fire_at, seq};
}

bool Engine::cancel(const EventHandle& handle) {
    return queue_.erase(Key{handle.at, handle.seq}) > 0;
}

std::size_t Engine::run_until(SimTime end) {
    if (end < clock_) {
        throw ScheduleError("run_until target precedes the clock");
    }
    std::size_t processed = 0;
    while (!queue_.empty()) {
        auto it = queue_.begin();
        if (it->first.first > end) {
            break;
        }
        Event ev = std::move(it->second);
        queue_.erase(it);
        clock_ = ev.fire_at;
        if (trace_) {
            trace_(ev);
        }
        try {
            ev.action();
        } catch (const std::exception& e) {
            throw EngineFault(std::string(to_string(ev.kind)) + " seq=" + std::to_string(ev.seq) +
                              " node=" + std::to_string(ev.node) + " t=" + std::to_string(ev.fire_at.us()) +
                              "us: " + e.what());
        }
        ++processed;
    }
    clock_ = end;
    return processed;
}

} // namespace manetsim
