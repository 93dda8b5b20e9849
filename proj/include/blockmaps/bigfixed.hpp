#pragma once

#include "blockmaps/bigrat.hpp"

#include <string>

namespace blockmaps {

// Fixed-point real: value = mant / 10^digits, mant a GMP integer.
// All binary operations require both operands at the same scale; mixing
// scales is a programming error and throws. Rounding is half-away-from-zero
// on the last retained digit, so each operation is accurate to 0.5 ulp and
// callers are expected to carry guard digits (the analytics layer works at
// requested precision + 12).
class BigFixed {
public:
    BigFixed() : digits_(0), mant_(0) {}
    explicit BigFixed(int digits) : digits_(digits), mant_(0) {}

    static BigFixed from_long(long v, int digits);
    static BigFixed from_ratio(const BigInt& num, const BigInt& den, int digits);
    static BigFixed from_rat(const BigRat& r, int digits);
    static BigFixed from_double(double v, int digits);
    // Decimal literal, e.g. "-3.14159"; excess fractional digits are rounded.
    static BigFixed parse(const std::string& dec, int digits);

    int digits() const { return digits_; }
    const BigInt& mantissa() const { return mant_; }

    BigFixed operator-() const;
    BigFixed operator+(const BigFixed& o) const;
    BigFixed operator-(const BigFixed& o) const;
    BigFixed operator*(const BigFixed& o) const;
    BigFixed operator/(const BigFixed& o) const;
    BigFixed& operator+=(const BigFixed& o) { return *this = *this + o; }
    BigFixed& operator-=(const BigFixed& o) { return *this = *this - o; }
    BigFixed& operator*=(const BigFixed& o) { return *this = *this * o; }
    BigFixed& operator/=(const BigFixed& o) { return *this = *this / o; }

    BigFixed mul_int(const BigInt& k) const;
    BigFixed div_int(const BigInt& k) const;
    BigFixed abs() const;
    // Integer power, e may be negative (then *this must be nonzero).
    BigFixed pow_int(long e) const;
    // Requires *this >= 0.
    BigFixed sqrt() const;
    // k-th root, k >= 1; requires *this >= 0.
    BigFixed nth_root(unsigned long k) const;

    int sign() const { return sgn(mant_); }
    bool operator<(const BigFixed& o) const;
    bool operator>(const BigFixed& o) const { return o < *this; }
    bool operator<=(const BigFixed& o) const { return !(o < *this); }
    bool operator>=(const BigFixed& o) const { return !(*this < o); }
    bool operator==(const BigFixed& o) const;

    double to_double() const;
    // Decimal string with out_digits fractional digits (default: all).
    std::string to_string(int out_digits = -1) const;

private:
    int digits_;
    BigInt mant_;

    static const BigInt& scale_pow(int digits);
    void check_same(const BigFixed& o) const;
};

// pi at the given scale, by Machin's arctangent formula. Cached per scale.
BigFixed bf_pi(int digits);
// Natural log, x > 0. Argument reduction by repeated square roots, then the
// atanh series.
BigFixed bf_ln(const BigFixed& x);

} // namespace blockmaps
