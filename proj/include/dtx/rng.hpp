#pragma once

#include <cstdint>
#include <random>

namespace dtx {

// Mixes two seeds into one (splitmix64 finalizer). Used to derive independent
// per-record / per-epoch RNG streams from a single global seed so that work
// can be sharded without changing the output.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Thin wrapper over std::mt19937_64 with portable draws. The standard
// distributions are implementation-defined, so uniform index / real draws are
// done by hand to make every seeded run byte-identical across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform integer in [0, n), n >= 1. Rejection sampling, no modulo bias.
    uint64_t uniform_index(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform real in [lo, hi) with 53 bits of randomness.
    double uniform_real(double lo, double hi) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace dtx
