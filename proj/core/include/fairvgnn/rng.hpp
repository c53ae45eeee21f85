#pragma once

#include <cmath>
#include <cstdint>

namespace fairvgnn {

/// Counter-based 64-bit generator (splitmix64). Every random draw in the
/// project flows through this so that splits, Gumbel noise, dropout and
/// synthetic graphs reproduce bit-for-bit across platforms.
///
/// stream(seed, tag) derives an independent stream for a named purpose;
/// advancing one stream never perturbs another.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1); never returns 0, safe for log().
    double next_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Multiply-shift rejection-free mapping; bias is < 2^-53 for the
        // range sizes used here (node counts).
        return static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
    }

    /// Standard normal via Box-Muller (one value per call, no caching so
    /// the stream position stays a pure function of call count).
    double next_normal() {
        double u1 = next_open();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Standard Gumbel(0,1): -log(-log(U)).
    double next_gumbel() {
        return -std::log(-std::log(next_open()));
    }

private:
    std::uint64_t state_;
};

/// Derive a named sub-stream from a master seed. Tags are small integers
/// documented at the call site (split/init/gumbel/dropout/...).
inline SplitMix64 rng_stream(std::uint64_t seed, std::uint64_t tag) {
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (tag + 1)));
    // burn one output so trivially related seeds decorrelate
    mix.next_u64();
    return mix;
}

namespace rng_tag {
inline constexpr std::uint64_t split = 1;
inline constexpr std::uint64_t init = 2;
inline constexpr std::uint64_t gumbel = 3;
inline constexpr std::uint64_t dropout = 4;
inline constexpr std::uint64_t synth = 5;
}  // namespace rng_tag

}  // namespace fairvgnn
