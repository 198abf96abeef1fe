#pragma once

#include <cstdint>

namespace residue {

/// SplitMix64 (Steele, Lea, Flood 2014), the only generator used in this
/// library. The state advances by the golden-ratio increment
/// 0x9e3779b97f4a7c15 and each output is the state passed through the
/// variant-13 finalizer (shifts 30/27/31, multipliers 0xbf58476d1ce4e5b9 and
/// 0x94d049bb133111eb). Fully specified by these constants, so any language
/// can reproduce the same streams bit for bit.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound) by rejection: draws below the largest
    /// multiple of `bound` that fits in 2^64 are reduced modulo `bound`,
    /// others are discarded. Requires bound >= 1.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        // 2^64 mod bound, computed without 128-bit arithmetic.
        const std::uint64_t rem = (0 - bound) % bound;
        const std::uint64_t limit = 0 - rem;  // == 2^64 - rem (mod 2^64)
        for (;;) {
            const std::uint64_t u = next();
            if (rem == 0 || u < limit) return u % bound;
        }
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    constexpr double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Independent stream seed derived from a base seed and a stream index.
    static constexpr std::uint64_t derive(std::uint64_t base, std::uint64_t index) noexcept {
        SplitMix64 g(base ^ (index * 0xd1b54a32d192ed03ULL));
        g.next();
        return g.next();
    }

private:
    std::uint64_t state_;
};

}  // namespace residue
