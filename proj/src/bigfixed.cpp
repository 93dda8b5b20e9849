#include "blockmaps/bigfixed.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace blockmaps {

namespace {

// Rounding division, half away from zero. den must be positive.
BigInt round_div(const BigInt& num, const BigInt& den) {
    BigInt q, r;
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    BigInt twice = 2 * ::abs(r);
    if (twice >= den) q += sgn(num);
    return q;
}

} // namespace

const BigInt& BigFixed::scale_pow(int digits) {
    static std::map<int, BigInt> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(digits);
    if (it == cache.end()) {
        BigInt s;
        mpz_ui_pow_ui(s.get_mpz_t(), 10, static_cast<unsigned long>(digits));
        it = cache.emplace(digits, s).first;
    }
    return it->second;
}

void BigFixed::check_same(const BigFixed& o) const {
    if (digits_ != o.digits_)
        throw std::logic_error("BigFixed scale mismatch");
}

BigFixed BigFixed::from_long(long v, int digits) {
    BigFixed r(digits);
    r.mant_ = BigInt(v) * scale_pow(digits);
    return r;
}

BigFixed BigFixed::from_ratio(const BigInt& num, const BigInt& den, int digits) {
    if (den == 0) throw std::invalid_argument("BigFixed: zero denominator");
    BigFixed r(digits);
    BigInt n = num * scale_pow(digits);
    if (den < 0)
        r.mant_ = round_div(-n, BigInt(-den));
    else
        r.mant_ = round_div(n, den);
    return r;
}

BigFixed BigFixed::from_rat(const BigRat& q, int digits) {
    return from_ratio(q.get_num(), q.get_den(), digits);
}

BigFixed BigFixed::from_double(double v, int digits) {
    if (!std::isfinite(v)) throw std::invalid_argument("BigFixed: non-finite double");
    BigRat q(v);
    return from_rat(q, digits);
}

BigFixed BigFixed::parse(const std::string& dec, int digits) {
    std::string s = dec;
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = s[0] == '-';
        s = s.substr(1);
    }
    auto dot = s.find('.');
    std::string ip = dot == std::string::npos ? s : s.substr(0, dot);
    std::string fp = dot == std::string::npos ? "" : s.substr(dot + 1);
    if (ip.empty() && fp.empty())
        throw std::invalid_argument("BigFixed: empty literal");
    for (char c : ip + fp)
        if (c < '0' || c > '9')
            throw std::invalid_argument("BigFixed: bad literal " + dec);
    BigInt ipart = ip.empty() ? BigInt(0) : BigInt(ip);
    BigFixed r(digits);
    r.mant_ = ipart * scale_pow(digits);
    if (!fp.empty()) {
        BigInt f(fp);
        int flen = static_cast<int>(fp.size());
        if (flen <= digits) {
            r.mant_ += f * scale_pow(digits - flen);
        } else {
            r.mant_ += round_div(f, scale_pow(flen - digits));
        }
    }
    if (neg) r.mant_ = -r.mant_;
    return r;
}

BigFixed BigFixed::operator-() const {
    BigFixed r(digits_);
    r.mant_ = -mant_;
    return r;
}

BigFixed BigFixed::operator+(const BigFixed& o) const {
    check_same(o);
    BigFixed r(digits_);
    r.mant_ = mant_ + o.mant_;
    return r;
}

BigFixed BigFixed::operator-(const BigFixed& o) const {
    check_same(o);
    BigFixed r(digits_);
    r.mant_ = mant_ - o.mant_;
    return r;
}

BigFixed BigFixed::operator*(const BigFixed& o) const {
    check_same(o);
    BigFixed r(digits_);
    r.mant_ = round_div(mant_ * o.mant_, scale_pow(digits_));
    return r;
}

BigFixed BigFixed::operator/(const BigFixed& o) const {
    check_same(o);
    if (o.mant_ == 0) throw std::domain_error("BigFixed: division by zero");
    BigInt n = mant_ * scale_pow(digits_);
    BigFixed r(digits_);
    if (o.mant_ < 0)
        r.mant_ = round_div(-n, BigInt(-o.mant_));
    else
        r.mant_ = round_div(n, o.mant_);
    return r;
}

BigFixed BigFixed::mul_int(const BigInt& k) const {
    BigFixed r(digits_);
    r.mant_ = mant_ * k;
    return r;
}

BigFixed BigFixed::div_int(const BigInt& k) const {
    if (k == 0) throw std::domain_error("BigFixed: division by zero");
    BigFixed r(digits_);
    if (k < 0)
        r.mant_ = round_div(-mant_, BigInt(-k));
    else
        r.mant_ = round_div(mant_, k);
    return r;
}

BigFixed BigFixed::abs() const {
    BigFixed r(digits_);
    r.mant_ = ::abs(mant_);
    return r;
}

BigFixed BigFixed::pow_int(long e) const {
    if (e < 0) {
        BigFixed inv = from_long(1, digits_) / *this;
        return inv.pow_int(-e);
    }
    BigFixed acc = from_long(1, digits_);
    BigFixed base = *this;
    unsigned long k = static_cast<unsigned long>(e);
    while (k) {
        if (k & 1) acc = acc * base;
        base = base * base;
        k >>= 1;
    }
    return acc;
}

BigFixed BigFixed::sqrt() const {
    if (mant_ < 0) throw std::domain_error("BigFixed: sqrt of negative");
    BigFixed r(digits_);
    BigInt t = mant_ * scale_pow(digits_);
    mpz_sqrt(r.mant_.get_mpz_t(), t.get_mpz_t());
    return r;
}

BigFixed BigFixed::nth_root(unsigned long k) const {
    if (k == 0) throw std::invalid_argument("BigFixed: 0th root");
    if (mant_ < 0) throw std::domain_error("BigFixed: root of negative");
    BigFixed r(digits_);
    // (m / S)^(1/k) = root_k(m * S^(k-1)) / S
    BigInt sk;
    mpz_pow_ui(sk.get_mpz_t(), scale_pow(digits_).get_mpz_t(), k - 1);
    BigInt t = mant_ * sk;
    mpz_root(r.mant_.get_mpz_t(), t.get_mpz_t(), k);
    return r;
}

bool BigFixed::operator<(const BigFixed& o) const {
    check_same(o);
    return mant_ < o.mant_;
}

bool BigFixed::operator==(const BigFixed& o) const {
    check_same(o);
    return mant_ == o.mant_;
}

double BigFixed::to_double() const {
    long em, es;
    double m = mpz_get_d_2exp(&em, mant_.get_mpz_t());
    double s = mpz_get_d_2exp(&es, scale_pow(digits_).get_mpz_t());
    return std::ldexp(m / s, static_cast<int>(em - es));
}

std::string BigFixed::to_string(int out_digits) const {
    if (out_digits < 0 || out_digits > digits_) out_digits = digits_;
    BigInt m = mant_;
    // Round away the digits we will not print.
    if (out_digits < digits_)
        m = round_div(m, scale_pow(digits_ - out_digits));
    const BigInt& s = scale_pow(out_digits);
    std::string sign = m < 0 ? "-" : "";
    BigInt a = ::abs(m);
    BigInt q = a / s, r = a % s;
    if (out_digits == 0) return sign + q.get_str();
    std::string frac = r.get_str();
    frac.insert(0, static_cast<size_t>(out_digits) - frac.size(), '0');
    return sign + q.get_str() + "." + frac;
}

namespace {

// atan(1/m) at scale S, by the integer Gregory series.
BigInt atan_inv_scaled(unsigned long m, const BigInt& S) {
    BigInt acc = 0;
    BigInt mm = BigInt(m) * m;
    BigInt p = m; // m^(2i+1)
    unsigned long i = 0;
    for (;;) {
        BigInt den = p * (2 * i + 1);
        BigInt term = round_div(S, den);
        if (term == 0) break;
        acc += (i % 2 == 0) ? term : -term;
        p *= mm;
        ++i;
    }
    return acc;
}

// Core of ln on (0, inf) with no caching: argument reduction to near 1 by
// doubling/halving (tracked in k2, the power of 2 factored out) and then
// repeated square roots (s of them), followed by 2*atanh((x-1)/(x+1)).
// Returns ln(x) - k2*ln(2) with k2 reported to the caller.
BigFixed ln_core(BigFixed x, long& k2) {
    int d = x.digits();
    BigFixed one = BigFixed::from_long(1, d);
    BigFixed two = BigFixed::from_long(2, d);
    BigFixed half = one / two;
    k2 = 0;
    while (x >= two) { x = x * half; ++k2; }
    while (x < half) { x = x * two; --k2; }
    int s = 0;
    BigFixed lo = BigFixed::parse("0.95", d);
    BigFixed hi = BigFixed::parse("1.05", d);
    while (x < lo || x > hi) { x = x.sqrt(); ++s; }
    BigFixed r = (x - one) / (x + one);
    BigFixed r2 = r * r;
    BigFixed term = r;
    BigFixed acc = BigFixed(d);
    unsigned long i = 0;
    while (term.sign() != 0) {
        acc += term.div_int(2 * i + 1);
        term = term * r2;
        ++i;
    }
    acc = acc.mul_int(2);
    return acc.mul_int(BigInt(1) << s);
}

BigFixed ln2_cached(int digits) {
    static std::map<int, BigFixed> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(digits);
    if (it == cache.end()) {
        // ln(1/2) reduces with k2 = 0 (1/2 sits on the boundary of the
        // halving loop), so it is safe to bootstrap ln2 from it.
        long k2 = 0;
        BigFixed v = ln_core(BigFixed::from_ratio(1, 2, digits), k2);
        if (k2 != 0)
            throw std::logic_error("ln2: degenerate reduction");
        it = cache.emplace(digits, -v).first;
    }
    return it->second;
}

} // namespace

BigFixed bf_pi(int digits) {
    static std::map<int, BigFixed> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(digits);
    if (it == cache.end()) {
        BigInt S;
        mpz_ui_pow_ui(S.get_mpz_t(), 10, static_cast<unsigned long>(digits));
        BigInt v = 16 * atan_inv_scaled(5, S) - 4 * atan_inv_scaled(239, S);
        BigFixed p = BigFixed::from_ratio(v, S, digits);
        it = cache.emplace(digits, p).first;
    }
    return it->second;
}

BigFixed bf_ln(const BigFixed& x) {
    if (x.sign() <= 0) throw std::domain_error("bf_ln: argument must be positive");
    long k2 = 0;
    BigFixed v = ln_core(x, k2);
    if (k2 != 0) v += ln2_cached(x.digits()).mul_int(k2);
    return v;
}

} // namespace blockmaps
