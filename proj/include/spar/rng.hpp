#pragma once

#include <cstdint>

#include "spar/types.hpp"

namespace spar {

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Stream tags keep independent consumers of one master seed apart.
enum class SeedStream : std::uint64_t {
    Data = 1,
    Method = 2,
    Theory = 3,
};

/// Child seed for (master, stream, index, sub). Each argument is folded in
/// through its own SplitMix64 round, so children of distinct tuples are
/// decorrelated and adding a consumer never shifts another one's seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                    std::uint64_t index, std::uint64_t sub = 0) noexcept
{
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ static_cast<std::uint64_t>(stream));
    s = splitmix64(s ^ index);
    return splitmix64(s ^ sub);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

} // namespace spar
