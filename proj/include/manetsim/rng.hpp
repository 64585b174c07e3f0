#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace manetsim {

/// Named deterministic random stream (xoshiro256++ seeded from a 64-bit seed
/// and a stream label). Each subsystem draws from its own stream so changing
/// one subsystem's consumption cannot perturb another's sequence.
class RngStream {
public:
    RngStream() : RngStream(0, "default") {}
    RngStream(std::uint64_t seed, std::string_view stream_id);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform_double();

    /// Uniform integer in [lo, hi], both inclusive. Throws on an empty range.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    double gaussian(double mean, double sd);

    const std::string& stream_id() const { return stream_id_; }

private:
    std::uint64_t state_[4];
    std::string stream_id_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace manetsim
