// Seeded random streams. All draws go through xoshiro256++ seeded via
// splitmix64, with Box-Muller normals, so a (seed, call sequence) pair fully
// determines the output independent of the standard library in use.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>

namespace tact {

// One splitmix64 step. Also the documented seed-derivation primitive:
// chain i's seed is obtained by advancing a splitmix64 state i+1 times
// from the master seed, so it depends only on (master, i).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for chain `index` derived from `master`; independent of chain count.
inline std::uint64_t derive_chain_seed(std::uint64_t master, std::size_t index) {
    std::uint64_t s = master;
    std::uint64_t out = 0;
    for (std::size_t i = 0; i <= index; ++i) out = splitmix64_next(s);
    return out;
}

// Per-purpose substream within one chain (dynamics noise, oracle noise,
// batch shuffling, initialization) keyed by a small tag.
inline std::uint64_t derive_stream_seed(std::uint64_t chain_seed, std::uint64_t tag) {
    std::uint64_t s = chain_seed ^ (tag * 0x9e3779b97f4a7c15ULL);
    return splitmix64_next(s);
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
        has_cached_normal_ = false;
        cached_normal_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        // u1 in (0,1] so the log is finite.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cached_normal_ = radius * std::sin(angle);
        has_cached_normal_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace tact
