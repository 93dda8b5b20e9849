#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace blockmaps {

using BigInt = mpz_class;
using BigRat = mpq_class;

// Parses "p/q" or a plain integer string. Throws std::invalid_argument on
// malformed input or zero denominator.
inline BigRat rat_from_string(const std::string& s) {
    BigRat r;
    if (r.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + s);
    if (r.get_den() == 0)
        throw std::invalid_argument("zero denominator: " + s);
    r.canonicalize();
    return r;
}

inline std::string rat_to_string(const BigRat& r) {
    return r.get_str();
}

inline BigInt binomial(unsigned long n, unsigned long k) {
    BigInt b;
    if (k > n) return 0;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return b;
}

// True iff r is an integer (denominator 1 after canonicalization).
inline bool rat_is_integer(const BigRat& r) {
    return r.get_den() == 1;
}

} // namespace blockmaps
