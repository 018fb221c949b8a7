#pragma once

#include <cmath>
#include <cstdint>

namespace qfound {

// splitmix64 output function. splitmix64 is counter based: the i-th output of
// a stream started at `state` is sm64_mix(state + (i+1) * kGolden).
inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t sm64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic per-task seed derivation: the (index+1)-th splitmix64 output
// of the stream started at `master`. Used to give every photon / restart /
// experiment sub-stream its own independent generator, so results do not
// depend on thread scheduling.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return sm64_mix(master + (index + 1) * kGolden);
}

// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
// This is the single random source of the project; the algorithm is fixed so
// that reimplementations can reproduce every sampled number from the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        for (int i = 0; i < 4; ++i) s_[i] = sm64_mix(seed + (i + 1) * kGolden);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Marsaglia's polar method (pair cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u, v, q;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double f = std::sqrt(-2.0 * std::log(q) / q);
        cached_ = v * f;
        have_cached_ = true;
        return u * f;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace qfound
