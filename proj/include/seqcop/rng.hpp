#pragma once

#include <cstdint>
#include <random>

namespace seqcop {

/// SplitMix64 step; used to derive well-separated seeds for substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic substream keyed by (seed, stream). Replicates and Monte
/// Carlo iterations each get their own stream so that results do not depend
/// on scheduling order.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ULL * (stream + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace seqcop
