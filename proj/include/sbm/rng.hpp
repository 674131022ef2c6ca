#pragma once

#include <cstdint>

namespace sbm {

// SplitMix64 generator (Steele, Lea, Flood 2014). Small state, passes BigCrush,
// and cheap to re-seed, which is what makes per-trial streams practical.
//
// Streams are derived from (seed, index) by hashing the pair through the
// SplitMix64 finalizer twice. Trial t of a Monte Carlo run always uses
// derive_key(seed, t), so results do not depend on execution order or the
// number of workers.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Independent stream key for (seed, index) pairs.
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t index) {
        return mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(index + 0xbf58476d1ce4e5b9ULL));
    }

    static SplitMix64 derive(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(derive_key(seed, index));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform integer in [lo, hi]. Modulo bias is negligible for the small
    // ranges used by the generators.
    std::uint64_t next_range(std::uint64_t lo, std::uint64_t hi) {
        return lo + next_u64() % (hi - lo + 1);
    }

    double next_real(double lo, double hi) { return lo + next_double() * (hi - lo); }

private:
    std::uint64_t state_;
};

}  // namespace sbm
