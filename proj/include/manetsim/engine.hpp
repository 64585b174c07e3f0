#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>

#include "manetsim/time.hpp"

namespace manetsim {

/// The closed set of things that can happen in a simulation world.
enum class EventKind : std::uint8_t {
    PacketDelivery,
    MobilityWaypoint,
    ProbeTimeout,
    RrepWindowExpiry,
    TrafficTick,
    MetricSnapshot,
};

const char* to_string(EventKind kind);

struct Event {
    SimTime fire_at;
    std::uint64_t seq = 0; // insertion counter, unique per engine
    EventKind kind = EventKind::PacketDelivery;
    std::int32_t node = -1;     // acting node, -1 when not node-scoped
    std::uint64_t detail = 0;   // kind-specific tag, used only for tracing
    std::function<void()> action;
};

struct EventHandle {
    SimTime at;
    std::uint64_t seq = 0;
};

/// Single-threaded discrete-event engine. Events fire in (fire_at, seq)
/// order; equal timestamps resolve by insertion order, which makes runs
/// with identical inputs byte-identical.
class Engine {
public:
    using TraceFn = std::function<void(const Event&)>;

    SimTime now() const { return clock_; }

    /// Queue an event. Throws ScheduleError if fire_at precedes the clock.
    EventHandle schedule(SimTime fire_at, EventKind kind, std::int32_t node, std::uint64_t detail,
                         std::function<void()> action);

    /// Remove a pending event. Returns false if it already fired or was cancelled.
    bool cancel(const EventHandle& handle);

    /// Process every event with fire_at <= end (boundary inclusive), then
    /// advance the clock to end. Returns the number of events processed.
    /// A throwing handler aborts the run with an EngineFault naming the event.
    std::size_t run_until(SimTime end);

    std::size_t pending() const { return queue_.size(); }

    void set_trace(TraceFn fn) { trace_ = std::move(fn); }

private:
    using Key = std::pair<SimTime, std::uint64_t>;
    SimTime clock_ = SimTime::zero();
    std::uint64_t next_seq_ = 0;
    std::map<Key, Event> queue_;
    TraceFn trace_;
};

} // namespace manetsim
