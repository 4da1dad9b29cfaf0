#pragma once

#include <cstdint>

namespace collab {

// SplitMix64: tiny, fast, and fully specified here so that streams are
// bit-identical across platforms and standard libraries. We deliberately do
// not use <random> engines or distributions anywhere results must reproduce.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1). 53 mantissa bits, never returns 1.0.
    double next_double() { return (next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound) without modulo bias (rejection on the tail).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

  private:
    std::uint64_t state_;
};

// Decorrelated substream: hash (seed, index) into a fresh SplitMix64 state.
// Used for per-year generator streams so that edits to one year's workload
// cannot perturb any other year's draws.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return SplitMix64(mixer.next());
}

}  // namespace collab
