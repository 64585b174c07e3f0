#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace manetsim {

/// Simulation time as fixed-point microseconds. Integer ticks keep event
/// ordering identical across platforms; floating seconds would not.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_us(std::int64_t us) { return SimTime{us}; }

    static SimTime from_seconds(double s) { return SimTime{std::llround(s * 1e6)}; }

    static constexpr SimTime zero() { return SimTime{0}; }

    constexpr std::int64_t us() const { return us_; }
    constexpr double seconds() const { return static_cast<double>(us_) * 1e-6; }
    constexpr double millis() const { return static_cast<double>(us_) * 1e-3; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime{us_ + o.us_}; }
    constexpr SimTime operator-(SimTime o) const { return SimTime{us_ - o.us_}; }
    SimTime& operator+=(SimTime o) {
        us_ += o.us_;
        return *this;
    }

private:
    constexpr explicit SimTime(std::int64_t us) : us_(us) {}
    std::int64_t us_ = 0;
};

} // namespace manetsim
