#pragma once

#include <cstdint>

namespace swarmbt {

/// splitmix64 step; used to derive independent stream seeds from one master
/// seed without correlated low bits.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic random stream (xoshiro256**). Distributions are hand-rolled
/// from raw 64-bit draws so sequences are identical across platforms and
/// standard libraries.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform01();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

private:
    std::uint64_t state_[4];
};

}  // namespace swarmbt
