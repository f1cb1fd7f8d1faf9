#pragma once

#include <cstdint>

namespace gapkit {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so replicas can be evaluated in any order or on
/// any worker and still reproduce bit for bit. Built on the SplitMix64
/// finalizer.
class CounterRng {
public:
    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix(seed * golden + mix(stream + 0x632be59bd9b4e019ULL))) {}

    constexpr std::uint64_t word(std::uint64_t counter) const noexcept {
        return mix(key_ + (counter + 1) * golden);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter) const noexcept {
        return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
    }

    /// A {-1, 0, +1} increment from 32 bits: floor(3u / 2^32) - 1. The three
    /// outcomes have probabilities within 2^-32 of 1/3.
    static constexpr int trit(std::uint32_t bits) noexcept {
        return static_cast<int>((static_cast<std::uint64_t>(bits) * 3u) >> 32) - 1;
    }

    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
};

}  // namespace gapkit
