#include "blockmaps/analytics.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace blockmaps {

namespace {

BigFixed bf_int(long v, int digits) { return BigFixed::from_long(v, digits); }

// Sum_{n >= M} n^{-s} for real s > 1 by the midpoint integral
// (M - 1/2)^{1-s} / (s - 1); relative error O(M^{-2}).
double zeta_tail(long M, double s) {
    return std::pow(double(M) - 0.5, 1.0 - s) / (s - 1.0);
}

double falling(double n, int d) {
    double f = 1;
    for (int i = 0; i < d; ++i) f *= n - i;
    return f;
}

// Sum_{n > N} (n)_d n^{-p} x^n for x in [0,1]; p - d > 1 required at x = 1.
double powerlaw_tail(long N, int d, double p, double x) {
    if (x <= 0) return 0;
    if (x >= 1.0 - 1e-12) {
        // (n)_d / n^p expanded into plain powers via inclusion of the
        // (n)_2 = n^2 - n case; d <= 2 here.
        if (d == 0) return zeta_tail(N + 1, p);
        if (d == 1) return zeta_tail(N + 1, p - 1);
        return zeta_tail(N + 1, p - 2) - zeta_tail(N + 1, p - 1);
    }
    double acc = 0;
    double xp = std::pow(x, double(N + 1));
    if (xp == 0) return 0;
    long n = N + 1;
    for (long it = 0; it < 2'000'000; ++it, ++n) {
        double term = falling(double(n), d) * std::pow(double(n), -p) * xp;
        acc += term;
        if (term < acc * 1e-17 + 1e-300) {
            acc += term * x / (1.0 - x);
            return acc;
        }
        xp *= x;
    }
    acc += falling(double(n), d) * std::pow(double(n), -p) * xp / (1.0 - x);
    return acc;
}

double log2_bigint(const BigInt& v) {
    long e = 0;
    double m = mpz_get_d_2exp(&e, v.get_mpz_t());
    return std::log2(std::fabs(m)) + double(e);
}

double log2_bigrat(const BigRat& v) {
    return log2_bigint(v.get_num()) - log2_bigint(v.get_den());
}

} // namespace

ModelConstants closed_constants(int digits) {
    if (digits < 8 || digits > 100000) throw std::domain_error("closed_constants: digit count out of range");
    ModelConstants mc;
    mc.print_digits = digits;
    const int W = digits + 12;
    mc.work_digits = W;

    const BigFixed pi = bf_pi(W);
    const BigFixed three_pi = pi.mul_int(3);
    const BigFixed c3pi8 = three_pi - bf_int(8, W);   // 3pi - 8
    const BigFixed c103pi = bf_int(10, W) - three_pi; // 10 - 3pi
    const BigFixed c4pi = bf_int(4, W) - pi;          // 4 - pi
    const BigFixed pi2 = pi * pi;

    mc.pi = pi;
    mc.rho_M = BigFixed::from_ratio(1, 16, W);
    mc.rho_B = (c3pi8 * c3pi8).mul_int(4) / pi2.mul_int(9);
    mc.rho_A = bf_int(2, W) - BigFixed::from_ratio(1, 4, W).nth_root(3).mul_int(3);
    // 420 pi - 81 pi^2 - 512 > 0, about 8.03.
    const BigFixed crit_den = pi.mul_int(420) - pi2.mul_int(81) - bf_int(512, W);
    mc.u_C = (pi * c4pi).mul_int(9) / crit_den;
    mc.B_rho = bf_int(8, W) - bf_int(64, W) / three_pi;
    mc.a1 = (c103pi * c3pi8).mul_int(8) / (pi * c4pi).mul_int(9);
    mc.Bp_rho = mc.a1 / mc.rho_B;
    mc.K_b = (c3pi8 * c3pi8 * c3pi8).mul_int(4) / (pi * c4pi * c4pi * c4pi).mul_int(27);
    mc.s1 = bf_int(2, W) / pi;

    if (!(mc.rho_B < mc.rho_A) || !(mc.rho_A < BigFixed::from_ratio(1, 8, W)))
        throw std::logic_error("closed_constants: radius ordering violated");
    if (!(bf_int(3, W) < mc.u_C) || !(mc.u_C < BigFixed::from_ratio(31, 10, W)))
        throw std::logic_error("closed_constants: critical weight out of its known bracket");
    return mc;
}

BSeriesEval::BSeriesEval(const TruncSeries& B, const ModelConstants& mc)
    : N_(B.order()), digits_(mc.work_digits), rho_(mc.rho_B) {
    if (N_ < 32) throw std::domain_error("BSeriesEval: series order too small");
    b_.reserve(N_ + 1);
    for (long k = 0; k <= N_; ++k) {
        const BigRat& c = B[k];
        if (c.get_den() != 1) throw std::domain_error("BSeriesEval: block counts must be integers");
        b_.push_back(c.get_num());
    }
    rho_d_ = rho_.to_double();
    K_d_ = mc.K_b.to_double();
}

BSeriesEval::Out BSeriesEval::eval(const BigFixed& y, int deriv) const {
    if (deriv < 0 || deriv > 2) throw std::domain_error("BSeriesEval: derivative order must be 0, 1 or 2");
    if (y.sign() < 0) throw std::domain_error("BSeriesEval: negative argument");
    if (rho_ < y) throw std::domain_error("BSeriesEval: argument beyond the series radius");
    const bool at_rho = !(y < rho_);
    if (deriv == 2 && at_rho)
        throw std::domain_error("BSeriesEval: second derivative diverges at the radius");

    // Exact head, Horner over the stored coefficients.
    BigFixed acc = bf_int(0, digits_);
    for (long k = N_; k >= deriv; --k) {
        BigInt c = b_[k];
        for (int i = 0; i < deriv; ++i) c *= (k - i);
        acc = acc * y + BigFixed::from_rat(BigRat(c), digits_);
    }

    // One-term tail model b_n ~ K rho^{-n} n^{-3} past the exact range.
    const double yd = y.to_double();
    const double x = std::min(yd / rho_d_, 1.0);
    double scale = 1;
    for (int i = 0; i < deriv; ++i) scale /= yd;
    double tail = 0, err = 0;
    if (x > 0) {
        tail = K_d_ * scale * powerlaw_tail(N_, deriv, 3.0, x);
        err = 2.0 * K_d_ * scale * powerlaw_tail(N_, deriv, 4.0, x);
    }
    err += double(N_ + 16) * 4.0 * std::pow(10.0, -digits_);

    return {acc + BigFixed::from_double(tail, digits_), err};
}

BigFixed solve_y_of_u(const BSeriesEval& be, const ModelConstants& mc, const BigFixed& u) {
    if (u.sign() <= 0) throw std::domain_error("solve_y_of_u: weight must be positive");
    if (!(mc.u_C < u)) return mc.rho_B;
    const int W = mc.work_digits;
    auto phi = [&](const BigFixed& y) {
        auto B0 = be.eval(y, 0);
        auto B1 = be.eval(y, 1);
        return (y * u * B1.value).mul_int(2) - (u * B0.value + bf_int(1, W) - u);
    };
    BigFixed lo = bf_int(0, W);
    BigFixed hi = mc.rho_B;
    // phi(0) = -1 < 0, and phi(rho_B) > 0 strictly above the critical weight,
    // so the root is bracketed; phi is increasing on the interval.
    int iters = int(3.33 * (W - 18)) + 8;
    for (int it = 0; it < iters; ++it) {
        BigFixed mid = (lo + hi).div_int(2);
        if (phi(mid).sign() < 0) lo = mid; else hi = mid;
    }
    return (lo + hi).div_int(2);
}

BigFixed numeric_u_C(const BSeriesEval& be, const ModelConstants& mc) {
    const int W = mc.work_digits;
    auto B0 = be.eval(mc.rho_B, 0);
    auto B1 = be.eval(mc.rho_B, 1);
    BigFixed den = (mc.rho_B * B1.value).mul_int(2) - B0.value + bf_int(1, W);
    if (den.sign() <= 0) throw std::logic_error("numeric_u_C: nonpositive denominator");
    return bf_int(1, W) / den;
}

BigFixed rho_of_u(const BSeriesEval& be, const ModelConstants& mc, const BigFixed& u) {
    const int W = mc.work_digits;
    BigFixed y = solve_y_of_u(be, mc, u);
    auto B0 = be.eval(y, 0);
    BigFixed norm = u * B0.value + bf_int(1, W) - u;
    if (norm.sign() <= 0) throw std::logic_error("rho_of_u: nonpositive normaliser");
    return y / (norm * norm);
}

RegimeConstants regime_constants(const BSeriesEval& be, const ModelConstants& mc, double u) {
    if (!(u > 0)) throw std::domain_error("regime_constants: weight must be positive");
    const int W = mc.work_digits;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    RegimeConstants rc;
    rc.u = u;

    const double uC_d = mc.u_C.to_double();
    if (std::fabs(u - uC_d) <= 1e-9 * uC_d) rc.regime = Regime::critical;
    else if (u < uC_d) rc.regime = Regime::subcritical;
    else rc.regime = Regime::supercritical;

    const BigFixed ub = BigFixed::from_double(u, W);
    rc.y_u = solve_y_of_u(be, mc, ub);
    {
        auto B0 = be.eval(rc.y_u, 0);
        BigFixed norm = ub * B0.value + bf_int(1, W) - ub;
        rc.rho_u = rc.y_u / (norm * norm);
    }

    const double pi = mc.pi.to_double();
    const double k1 = 3 * pi - 8, k2 = 10 - 3 * pi, k3 = 4 - pi;
    const double lin = (21 * pi - 64) * u + 3 * pi;
    rc.c_u = 4 * k1 * k1 * k1 / (9 * k3 * k3 * k3) * u / lin;
    rc.E_u = (rc.regime == Regime::subcritical)
                 ? 16 * k1 * k2 / (3 * k3) * u / lin
                 : 1.0;

    rc.q = rc.r = rc.s = rc.sigma2 = rc.gamma = nan;
    switch (rc.regime) {
    case Regime::subcritical: {
        rc.q = 1 + u * (7 - 64 / (3 * pi));
        rc.r = 8 * u * k1 * k2 * lin /
               ((243 * u - 27) * pi * pi * pi - (1260 * u - 108) * pi * pi + 1536 * pi * u);
        double sden = 81 * pi * pi * u + 512 * u + 36 * pi - 420 * pi * u - 9 * pi * pi;
        rc.s = 2 * u * lin * lin * lin * k1 * k1 * k1 / (pi * sden * sden * sden);
        break;
    }
    case Regime::critical: {
        double cden = 420 * pi - 81 * pi * pi - 512;
        rc.q = (864 * pi - 144 * pi * pi - 1280) / cden;
        rc.s = 16 * std::sqrt(6.0) * std::pow(k2, 1.5) * k3 / cden;
        rc.gamma = std::sqrt(2 * rc.c_u);
        break;
    }
    case Regime::supercritical: {
        auto B0 = be.eval(rc.y_u, 0);
        auto B1 = be.eval(rc.y_u, 1);
        auto B2 = be.eval(rc.y_u, 2);
        double yd = rc.y_u.to_double();
        rc.q = u * B0.value.to_double() + 1 - u;
        rc.sigma2 = 1 + 2 * yd * B2.value.to_double() / B1.value.to_double();
        rc.s = rc.q / std::sqrt(rc.sigma2);
        rc.gamma = std::sqrt(rc.sigma2) / 2;
        break;
    }
    }
    return rc;
}

TrendReport verify_bn_asymptotics(const TruncSeries& B, const ModelConstants& mc,
                                  const std::vector<long>& checkpoints) {
    TrendReport rep;
    const double lrho = std::log2(mc.rho_B.to_double());
    const double lK = std::log2(mc.K_b.to_double());
    for (long n : checkpoints) {
        if (n < 1 || n > B.order()) continue;
        const BigRat& c = B[n];
        double lb = log2_bigrat(c);
        double ratio = std::exp2(lb + double(n) * lrho + 3 * std::log2(double(n)) - lK);
        rep.rows.push_back({n, ratio});
    }
    if (rep.rows.size() < 3) {
        rep.note = "not enough checkpoints inside the series order";
        return rep;
    }
    auto dev = [](double r) { return std::fabs(r - 1.0); };
    const auto& rows = rep.rows;
    bool within = dev(rows.back().ratio) < 0.15;
    bool shrinking = dev(rows.back().ratio) < dev(rows.front().ratio);
    bool tail_monotone = true;
    for (size_t i = rows.size() >= 3 ? rows.size() - 3 : 0; i + 1 < rows.size(); ++i)
        if (dev(rows[i + 1].ratio) > dev(rows[i].ratio)) tail_monotone = false;
    rep.ok = within && shrinking && tail_monotone;
    std::ostringstream os;
    os << "final ratio " << rows.back().ratio << " (|dev| " << dev(rows.back().ratio)
       << "), shrinking=" << (shrinking ? "yes" : "no")
       << ", tail-monotone=" << (tail_monotone ? "yes" : "no");
    rep.note = os.str();
    return rep;
}

TrendReport verify_Mu_asymptotics(const TruncSeries& B, const ModelConstants& mc,
                                  const BigRat& u, const std::vector<long>& ns) {
    TrendReport rep;
    const double ud = mpq_get_d(u.get_mpq_t());
    RegimeConstants rc = [&] {
        BSeriesEval be(B, mc);
        return regime_constants(be, mc, ud);
    }();
    const double lrho = std::log2(rc.rho_u.to_double());

    for (long n : ns) {
        if (n < 2) continue;
        BigRat c = coeff_M_at_u(n, u);
        double lobs = log2_bigrat(c);
        double lpred;
        switch (rc.regime) {
        case Regime::subcritical:
            lpred = std::log2(2 * rc.s) - double(n) * lrho - 3 * std::log2(double(n));
            break;
        case Regime::critical:
            lpred = std::log2(rc.s / (2 * std::sqrt(M_PI))) - double(n) * lrho -
                    1.5 * std::log2(double(n)) - 0.5 * std::log2(std::log(double(n)));
            break;
        default:
            lpred = std::log2(rc.s / (2 * std::sqrt(M_PI))) - double(n) * lrho -
                    1.5 * std::log2(double(n));
            break;
        }
        rep.rows.push_back({n, std::exp2(lobs - lpred)});
    }
    if (rep.rows.empty()) {
        rep.note = "no checkpoints";
        return rep;
    }
    auto dev = [](double r) { return std::fabs(r - 1.0); };
    rep.ok = dev(rep.rows.back().ratio) < dev(rep.rows.front().ratio) &&
             dev(rep.rows.back().ratio) < 0.2;
    std::ostringstream os;
    os << "final ratio " << rep.rows.back().ratio;
    rep.note = os.str();
    return rep;
}

void emit_y_curve(std::ostream& os, const BSeriesEval& be, const ModelConstants& mc,
                  double u_min, double u_max, int steps) {
    if (!(u_min > 0) || !(u_max > u_min) || steps < 1)
        throw std::domain_error("emit_y_curve: bad grid");
    const int W = mc.work_digits;
    os << "u,y\n";
    BigFixed prev = mc.rho_B;
    bool first = true;
    for (int i = 0; i <= steps; ++i) {
        double u = u_min + (u_max - u_min) * double(i) / double(steps);
        BigFixed ub = BigFixed::from_double(u, W);
        BigFixed y = solve_y_of_u(be, mc, ub);
        // Tolerate bisection noise far below the printed precision.
        if (!first && prev < y && (y - prev).to_double() > 1e-20)
            throw std::logic_error("emit_y_curve: curve increased");
        os << u << "," << y.to_string(32) << "\n";
        prev = y;
        first = false;
    }
}

} // namespace blockmaps
