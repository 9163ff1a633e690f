#pragma once

#include <cstdint>

namespace attractorlab {

// Deterministic seeding scheme: one global 64-bit seed, expanded per task and
// per sample index through splitmix64.  Every parallel worker derives its
// stream from (seed, task_tag, sample_index) alone, so results never depend
// on the worker count or on scheduling order.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Small task tags keep derived streams for distinct estimators disjoint.
enum class RngTag : std::uint64_t {
    attractor_sample = 1,
    probe_sample     = 2,
    nonwander_start  = 3,
    saturation_probe = 4,
    generic          = 5,
};

inline std::uint64_t derive_seed(std::uint64_t seed, RngTag tag, std::uint64_t index) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0x6a09e667f3bcc908ULL * (static_cast<std::uint64_t>(tag) + 1);
    (void)splitmix64(s);
    s ^= index * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL;
    return splitmix64(s);
}

// Minimal splitmix-backed generator; statistical quality is ample for start
// point sampling and probe directions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Multiply-shift bound; bias is negligible for the n used here.
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

private:
    std::uint64_t state_;
};

}  // namespace attractorlab
