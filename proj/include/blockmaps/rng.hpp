#pragma once

#include "blockmaps/bigrat.hpp"

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace blockmaps {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic generator, one independent stream per (seed, stream) pair.
// Replica r of an experiment uses stream r, which keeps runs bit-identical
// under any replica scheduling.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : eng_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

    std::uint64_t u64() { return eng_(); }

    // Unbiased integer in [0, n), masked rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below(0)");
        std::uint64_t mask = n <= 1 ? 0 : (std::bit_ceil(n) - 1);
        for (;;) {
            std::uint64_t v = eng_() & mask;
            if (v < n) return v;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

// Unbiased big integer in [0, n), n >= 1.
inline BigInt below_big(Rng& rng, const BigInt& n) {
    if (n <= 0) throw std::invalid_argument("below_big: bound must be positive");
    size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    size_t words = (bits + 63) / 64;
    for (;;) {
        BigInt v = 0;
        for (size_t i = 0; i < words; ++i) {
            v <<= 64;
            v += BigInt(rng.u64());
        }
        BigInt r;
        mpz_fdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), bits);
        if (r < n) return r;
    }
}

} // namespace blockmaps
