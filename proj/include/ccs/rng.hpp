#pragma once

#include <cstdint>
#include <cmath>

namespace ccs {

/// Counter-based pseudo-random stream (SplitMix64 finalizer applied to a
/// keyed counter). The mapping seed -> stream is pure integer arithmetic,
/// so sampled bits are identical across platforms for a given seed.
/// Substreams derived via substream(tag) are independent keyed streams,
/// used to key per-trial / per-slot randomness.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))) {}

    Rng substream(std::uint64_t tag) const {
        Rng r(0);
        r.key_ = mix(key_ + mix(tag + 0xbf58476d1ce4e5b9ull));
        r.ctr_ = 0;
        r.have_spare_ = false;
        return r;
    }

    std::uint64_t next_u64() {
        return mix(key_ + (++ctr_) * 0x9e3779b97f4a7c15ull);
    }

    bool next_bit() { return (next_u64() >> 63) != 0; }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ccs
