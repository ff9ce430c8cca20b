#pragma once

#include <cstdint>

namespace ldpcdo {

/// Counter-based pseudo-random stream (splitmix64 core).
///
/// Path p of a simulation owns the stream RngStream(seed, p); the draws it
/// produces depend only on (seed, p), never on scheduling, so parallel runs
/// are bit-reproducible at any worker count.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t substream = 0)
        : state_(mix(seed ^ mix(substream + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform draw in the open interval (0,1).
    double next_uniform() {
        // 53 mantissa bits, then shift off zero.
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-54;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace ldpcdo
