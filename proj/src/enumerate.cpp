#include "blockmaps/enumerate.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace blockmaps {

namespace {

using ZVec = std::vector<BigInt>;

// Σ_{i=start..k} x[i] y[k-i]. Callers guarantee the index ranges; the checks
// are cheap next to the big-integer work.
BigInt conv_at(const ZVec& x, const ZVec& y, long k, long start = 0) {
    BigInt acc = 0;
    long hi = std::min<long>(k, static_cast<long>(x.size()) - 1);
    for (long i = start; i <= hi; ++i) {
        long j = k - i;
        if (j < 0 || j >= static_cast<long>(y.size()))
            throw std::logic_error("conv_at: index outside computed range");
        mpz_addmul(acc.get_mpz_t(), x[i].get_mpz_t(), y[j].get_mpz_t());
    }
    return acc;
}

// Truncated product, result length cap+1.
ZVec zmul(const ZVec& a, const ZVec& b, long cap) {
    ZVec r(static_cast<size_t>(cap) + 1);
    long alen = static_cast<long>(a.size());
    for (long i = 0; i < alen && i <= cap; ++i) {
        if (a[i] == 0) continue;
        long jmax = std::min<long>(cap - i, static_cast<long>(b.size()) - 1);
        for (long j = 0; j <= jmax; ++j)
            mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
    return r;
}

ZVec zpow(ZVec base, unsigned long e, long cap) {
    ZVec acc(static_cast<size_t>(cap) + 1);
    acc[0] = 1;
    while (e) {
        if (e & 1) acc = zmul(acc, base, cap);
        e >>= 1;
        if (e) base = zmul(base, base, cap);
    }
    return acc;
}

// Composition outer(inner), inner[0] = 0, truncated at cap.
ZVec zcompose(const ZVec& outer, const ZVec& inner, long cap) {
    ZVec r(static_cast<size_t>(cap) + 1);
    for (size_t t = outer.size(); t-- > 0;) {
        r = zmul(r, inner, cap);
        r[0] += outer[t];
    }
    return r;
}

const BigInt& mullin_table(long n) {
    static std::vector<BigInt> m{BigInt(1)};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<long>(m.size()) <= n) {
        long k = static_cast<long>(m.size()) - 1;
        // m_{k+1} = m_k * 4(2k+1)(2k+3) / ((k+2)(k+3)), division exact
        BigInt t = m.back() * (4 * (2 * k + 1) * (2 * k + 3));
        BigInt d = BigInt(k + 2) * (k + 3);
        if (mpz_divisible_p(t.get_mpz_t(), d.get_mpz_t()) == 0)
            throw std::logic_error("map-count recurrence produced a fraction");
        BigInt next;
        mpz_divexact(next.get_mpz_t(), t.get_mpz_t(), d.get_mpz_t());
        m.push_back(next);
    }
    return m[static_cast<size_t>(n)];
}

ZVec to_int_vec(const TruncSeries& s, const char* what) {
    ZVec v(static_cast<size_t>(s.order()) + 1);
    for (int k = 0; k <= s.order(); ++k) {
        if (!rat_is_integer(s[k]))
            throw std::invalid_argument(std::string(what) + ": expected integer coefficients");
        v[static_cast<size_t>(k)] = s[k].get_num();
    }
    return v;
}

TruncSeries from_int_vec(const ZVec& v, int order) {
    std::vector<BigRat> cs(v.begin(), v.end());
    return TruncSeries::from_coeffs(std::move(cs), order);
}

} // namespace

BigInt catalan(long n) {
    if (n < 0) throw std::invalid_argument("catalan: negative index");
    BigInt b = binomial(2 * static_cast<unsigned long>(n), static_cast<unsigned long>(n));
    BigInt r;
    mpz_divexact_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(n) + 1);
    return r;
}

BigInt mullin_count(long n) {
    if (n < 0) throw std::invalid_argument("mullin_count: negative index");
    return mullin_table(n);
}

TruncSeries series_M(int N) {
    std::vector<BigRat> cs(static_cast<size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) cs[static_cast<size_t>(k)] = BigRat(mullin_table(k));
    return TruncSeries::from_coeffs(std::move(cs), N);
}

DfiniteReport verify_dfinite(const TruncSeries& M) {
    int N = M.order();
    if (N < 4) throw std::invalid_argument("verify_dfinite: order must be at least 4");
    auto cf = [&](int j) -> BigRat { return (j < 0 || j > N) ? BigRat(0) : M[j]; };
    auto D1 = [&](int j) -> BigRat { return cf(j + 1) * (j + 1); };
    auto D2 = [&](int j) -> BigRat { return cf(j + 2) * ((j + 1) * (j + 2)); };
    auto D3 = [&](int j) -> BigRat { return cf(j + 3) * ((j + 1) * (j + 2)) * (j + 3); };
    DfiniteReport rep{true, N - 3, -1};
    for (int k = 0; k <= N - 3; ++k) {
        // coefficient of z^k in z^2(16z-1)M''' + 6z(16z-1)M'' + 6(18z-1)M' + 12M
        BigRat r = D3(k - 3) * 16 - D3(k - 2);
        r += D2(k - 2) * 96 - D2(k - 1) * 6;
        r += D1(k - 1) * 108 - D1(k) * 6;
        r += cf(k) * 12;
        if (r != 0) {
            rep.ok = false;
            rep.first_bad = k;
            return rep;
        }
    }
    return rep;
}

TruncSeries extract_B_triangular(const TruncSeries& M) {
    int N = M.order();
    ZVec mz = to_int_vec(M, "extract_B");
    if (mz[0] != 1) throw std::invalid_argument("extract_B: series must start at 1");
    // H = z M^2, monic of valuation 1, so the solve needs no divisions.
    ZVec H(static_cast<size_t>(N) + 1);
    for (long k = 1; k <= N; ++k) H[k] = conv_at(mz, mz, k - 1);
    ZVec b(static_cast<size_t>(N) + 1);
    ZVec R = mz;
    b[0] = R[0];
    R[0] = 0;
    ZVec Hp = H;
    for (long k = 1; k <= N; ++k) {
        b[k] = R[k];
        if (b[k] != 0)
            for (long t = k; t <= N; ++t)
                mpz_submul(R[t].get_mpz_t(), b[k].get_mpz_t(), Hp[t].get_mpz_t());
        if (k < N) Hp = zmul(Hp, H, N);
    }
    for (long t = 0; t <= N; ++t)
        if (R[t] != 0) throw std::logic_error("extract_B: inconsistent substitution");
    return from_int_vec(b, N);
}

TruncSeries extract_B_transport(int N) {
    if (N < 0) throw std::invalid_argument("extract_B_transport: negative order");
    // B satisfies a third-order linear differential equation in y with the
    // coefficient series below, obtained by transporting the equation for M
    // through y = z M(z)^2 and clearing denominators with powers of
    // g(y) = y / B(y)^2 (the inverse substitution) and its derivatives:
    //   C3 B''' + C2 B'' + C1 B' + C0 B = 0,
    //   C3 = g^2(16g-1) g'^2
    //   C2 = -3 g^2(16g-1) g' g'' + 6 g(16g-1) g'^3
    //   C1 = g^2(16g-1)(3g''^2 - g'g''') - 6 g(16g-1) g'^2 g'' + 6(18g-1) g'^4
    //   C0 = 12 g'^5.
    // Reading off the coefficient of y^m gives b_{m+1} with total weight
    // -(m+1)(m+2)(m+3), every other term using only b_0..b_m, so the whole
    // table fills in one pass with O(N^2) products. All intermediates stay
    // integral because g = y B^{-2} has integer coefficients.
    ZVec b{BigInt(1)};
    ZVec bsq, binv2, g, d1, d2, d3, q2, q3, q4, e2, e3, e4, e5;
    ZVec f12, f22, f13, G2, G1, W, C3, C2, C1, C0;
    auto extend = [](ZVec& v, long target, auto&& entry) {
        while (static_cast<long>(v.size()) <= target) {
            long k = static_cast<long>(v.size());
            v.push_back(entry(k));
        }
    };
    for (long m = 0; m < N; ++m) {
        extend(bsq, m, [&](long k) { return conv_at(b, b, k); });
        extend(binv2, m, [&](long k) {
            return k == 0 ? BigInt(1) : BigInt(-conv_at(bsq, binv2, k, 1));
        });
        extend(g, m + 1, [&](long k) { return k == 0 ? BigInt(0) : binv2[k - 1]; });
        extend(d1, m, [&](long k) { return BigInt(g[k + 1] * (k + 1)); });
        extend(d2, m - 1, [&](long k) { return BigInt(d1[k + 1] * (k + 1)); });
        extend(d3, m - 2, [&](long k) { return BigInt(d2[k + 1] * (k + 1)); });
        extend(q2, m, [&](long k) { return conv_at(g, g, k, 1); });
        extend(q3, m, [&](long k) { return conv_at(q2, g, k, 2); });
        extend(e2, m, [&](long k) { return conv_at(d1, d1, k); });
        extend(e3, m - 1, [&](long k) { return conv_at(e2, d1, k); });
        extend(e4, m, [&](long k) { return conv_at(e2, e2, k); });
        extend(e5, m, [&](long k) { return conv_at(e4, d1, k); });
        extend(q4, m, [&](long k) { return conv_at(g, e4, k, 1); });
        extend(f12, m - 1, [&](long k) { return conv_at(d1, d2, k); });
        extend(f22, m - 2, [&](long k) { return conv_at(d2, d2, k); });
        extend(f13, m - 2, [&](long k) { return conv_at(d1, d3, k); });
        extend(G2, m, [&](long k) { return BigInt(q3[k] * 16 - q2[k]); });
        extend(G1, m, [&](long k) { return BigInt(q2[k] * 16 - g[k]); });
        extend(W, m - 2, [&](long k) { return BigInt(f22[k] * 3 - f13[k]); });
        extend(C3, m, [&](long k) { return conv_at(G2, e2, k, 2); });
        extend(C2, m, [&](long k) {
            return BigInt(conv_at(G1, e3, k, 1) * 6 - conv_at(G2, f12, k, 2) * 3);
        });
        extend(C1, m, [&](long k) {
            BigInt v = conv_at(G2, W, k, 2);
            v -= conv_at(G1, f12, k, 1) * 6;
            v += (q4[k] * 18 - e4[k]) * 6;
            return v;
        });
        extend(C0, m, [&](long k) { return BigInt(e5[k] * 12); });

        // Coefficient of y^m of C3 B''' + C2 B'' + C1 B' + C0 B, with the
        // b_{m+1} slots (i=3,2,1 below their respective lower bounds) left
        // out; what remains equals (m+1)(m+2)(m+3) b_{m+1}.
        BigInt R = 0, t;
        for (long i = 0; i <= m; ++i)
            mpz_addmul(R.get_mpz_t(), C0[i].get_mpz_t(), b[m - i].get_mpz_t());
        for (long i = 1; i <= m; ++i) {
            t = C1[i] * b[m - i + 1];
            R += t * (m - i + 1);
        }
        for (long i = 2; i <= m; ++i) {
            t = C2[i] * b[m - i + 2];
            R += t * ((m - i + 1) * (m - i + 2));
        }
        for (long i = 3; i <= m; ++i) {
            t = C3[i] * b[m - i + 3];
            R += t * ((m - i + 1) * (m - i + 2)) * (m - i + 3);
        }
        BigInt div = BigInt((m + 1) * (m + 2)) * (m + 3);
        if (mpz_divisible_p(R.get_mpz_t(), div.get_mpz_t()) == 0)
            throw std::logic_error("block recurrence: non-integral coefficient");
        BigInt next;
        mpz_divexact(next.get_mpz_t(), R.get_mpz_t(), div.get_mpz_t());
        if (next <= 0)
            throw std::logic_error("block recurrence: nonpositive coefficient");
        b.push_back(next);
    }
    return from_int_vec(b, N);
}

TruncSeries extract_B(const TruncSeries& M) {
    int N = M.order();
    for (int k = 0; k <= N; ++k)
        if (M[k] != BigRat(mullin_table(k)))
            throw std::invalid_argument("extract_B: input is not the tree-rooted map series");
    if (N <= 320) return extract_B_triangular(M);
    return extract_B_transport(N);
}

BiSeries bivariate_M(int N) {
    if (N < 0) throw std::invalid_argument("bivariate_M: negative order");
    if (N > 32)
        throw std::domain_error(
            "bivariate_M: full polynomial table restricted to order <= 32; "
            "use coeff_M_at_u for single coefficients");
    TruncSeries B = extract_B(series_M(N));
    UPoly u = UPoly::var();
    BiSeries Mb(N);
    Mb.at(0) = UPoly(1);
    // [z^k] of u B(z M^2) + (1-u) depends only on coefficients below k,
    // so one sweep suffices.
    for (int k = 1; k <= N; ++k) {
        BiSeries Mk = Mb.truncated(k);
        BiSeries M2 = Mk * Mk;
        BiSeries H(k);
        for (int t = 1; t <= k; ++t) H.at(t) = M2[t - 1];
        BiSeries comp(k);
        for (int j = k; j >= 0; --j) {
            comp = comp * H;
            comp.at(0) = comp[0] + UPoly::constant(B[j]);
        }
        Mb.at(k) = u * comp[k];
    }
    return Mb;
}

BigRat coeff_M_at_u(const TruncSeries& B, const BigRat& u, long n) {
    if (n < 0) throw std::invalid_argument("coeff_M_at_u: negative index");
    if (n == 0) return BigRat(1);
    if (n > B.order()) throw std::invalid_argument("coeff_M_at_u: B order too small");
    if (u == 1) return BigRat(mullin_table(n));
    ZVec b = to_int_vec(B, "coeff_M_at_u");
    // [z^n] M(z,u) = (u/n) [y^(n-1)] B'(y) (u B(y) + 1 - u)^(2n).
    // With u = p/q in lowest terms, q (uB + 1 - u) has integer coefficients
    // (q, p b_1, p b_2, ...), so everything stays in Z until one final
    // division by n q^(2n+1).
    BigInt p = u.get_num(), q = u.get_den();
    long cap = n - 1;
    ZVec base(static_cast<size_t>(cap) + 1);
    base[0] = q;
    for (long k = 1; k <= cap; ++k) base[k] = p * b[k];
    ZVec pw = zpow(std::move(base), 2 * static_cast<unsigned long>(n), cap);
    ZVec bp(static_cast<size_t>(cap) + 1);
    for (long j = 0; j <= cap; ++j) bp[j] = b[j + 1] * (j + 1);
    BigInt r = conv_at(bp, pw, cap);
    BigInt num = p * r;
    BigInt den;
    mpz_pow_ui(den.get_mpz_t(), q.get_mpz_t(), 2 * static_cast<unsigned long>(n) + 1);
    den *= n;
    BigRat ans(num, den);
    ans.canonicalize();
    return ans;
}

SPSystem series_parallel_system(int N) {
    if (N < 1) throw std::invalid_argument("series_parallel_system: order must be >= 1");
    size_t L = static_cast<size_t>(N) + 1;
    // Main unknowns and the auxiliary unit-series built from them:
    //   u1 = y + P      d1r = 1/(1 - y - P)     e1 = d1r^2   t1 = u1^2
    //   u2b = y + Sbar  d2r = 1/(1 - y - Sbar)  e2r = d2r^2  t2 = u2b^2
    //   u1b = y + Pbar  u2 = y + S
    // Every right-hand side has valuation >= 2 in the main unknowns, so the
    // order-m coefficients follow from data of order < m.
    ZVec s(L), sb(L), p(L), pb(L);
    ZVec u1(L), u1b(L), u2(L), u2b(L), t1(L), t2(L), d1r(L), d2r(L), e1(L), e2r(L);
    d1r[0] = 1;
    d2r[0] = 1;
    e1[0] = 1;
    e2r[0] = 1;
    for (long m = 1; m <= N; ++m) {
        // The squares only combine indices 1..m-1, so they come first.
        t1[m] = conv_at(u1, u1, m, 1);
        t2[m] = conv_at(u2b, u2b, m, 1);
        // S = (y+P)^2 / (1-y-P)
        s[m] = conv_at(t1, d1r, m, 2);
        // Sbar = (y+Pbar) (1/(1-y-P)^2 - 1)
        for (long i = 1; i <= m - 1; ++i)
            mpz_addmul(sb[m].get_mpz_t(), u1b[i].get_mpz_t(), e1[m - i].get_mpz_t());
        // P = (y+S) (1/(1-y-Sbar)^2 - 1)
        for (long i = 1; i <= m - 1; ++i)
            mpz_addmul(p[m].get_mpz_t(), u2[i].get_mpz_t(), e2r[m - i].get_mpz_t());
        // Pbar = (y+Sbar)^2 / (1-y-Sbar)
        pb[m] = conv_at(t2, d2r, m, 2);

        u1[m] = p[m] + (m == 1 ? 1 : 0);
        u1b[m] = pb[m] + (m == 1 ? 1 : 0);
        u2[m] = s[m] + (m == 1 ? 1 : 0);
        u2b[m] = sb[m] + (m == 1 ? 1 : 0);
        // The reciprocals and their squares do see index m.
        d1r[m] = conv_at(u1, d1r, m, 1);
        d2r[m] = conv_at(u2b, d2r, m, 1);
        e1[m] = conv_at(d1r, d1r, m);
        e2r[m] = conv_at(d2r, d2r, m);
    }
    if (s != pb || p != sb)
        throw std::logic_error("series_parallel_system: mirror symmetry broken");
    ZVec a(L), ab(L);
    for (long m = 0; m <= N; ++m) {
        a[m] = s[m] + p[m] + (m == 1 ? 1 : 0);
        ab[m] = sb[m] + pb[m] + (m == 1 ? 1 : 0);
    }
    SPSystem sys{from_int_vec(a, N),  from_int_vec(ab, N), from_int_vec(s, N),
                 from_int_vec(sb, N), from_int_vec(p, N),  from_int_vec(pb, N)};
    return sys;
}

namespace {

// Compositional inverse on integer vectors, f[0] = 0, f[1] = 1.
ZVec zrevert(const ZVec& f) {
    long N = static_cast<long>(f.size()) - 1;
    if (N < 1 || f[0] != 0 || f[1] != 1)
        throw std::invalid_argument("revert: need f(0)=0 and unit linear coefficient");
    // phi = y / f(y), a unit series with integer coefficients; then the
    // inverse has coefficients g_n = (1/n) [y^(n-1)] phi^n.
    ZVec w(static_cast<size_t>(N));
    for (long j = 0; j < N; ++j) w[j] = f[j + 1];
    ZVec phi(static_cast<size_t>(N));
    phi[0] = 1;
    for (long k = 1; k < N; ++k) phi[k] = -conv_at(w, phi, k, 1);
    ZVec res(static_cast<size_t>(N) + 1);
    res[1] = 1;
    ZVec pw = phi;
    for (long n = 2; n <= N; ++n) {
        pw = zmul(pw, phi, N - 1);
        BigInt c = pw[n - 1];
        if (mpz_divisible_ui_p(c.get_mpz_t(), static_cast<unsigned long>(n)) == 0)
            throw std::logic_error("revert: non-integral coefficient");
        mpz_divexact_ui(res[n].get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(n));
    }
    return res;
}

} // namespace

TruncSeries revert_series(const TruncSeries& f) {
    ZVec fz = to_int_vec(f, "revert_series");
    return from_int_vec(zrevert(fz), f.order());
}

TruncSeries extract_Q(const TruncSeries& B, const TruncSeries& A) {
    int N = B.order();
    if (A.order() != N) throw SeriesOrderMismatch();
    if (N < 2) throw std::invalid_argument("extract_Q: order too small");
    ZVec bb = to_int_vec(B, "extract_Q");
    ZVec aa = to_int_vec(A, "extract_Q");
    if (bb[0] != 1 || aa[0] != 0 || aa[1] != 1)
        throw std::invalid_argument("extract_Q: unexpected leading coefficients");
    ZVec num(static_cast<size_t>(N) + 1);
    for (long k = 0; k <= N; ++k) {
        num[k] = bb[k];
        if (k == 0) num[k] -= 1;
        if (k == 1) num[k] -= 2;
        if (k >= 1) num[k] -= 2 * aa[k - 1];
    }
    if (num[0] != 0 || num[1] != 0)
        throw std::logic_error("extract_Q: numerator has low-order terms");
    // Strip one factor of y from numerator and denominator y A'(y); the
    // reduced denominator is a unit series with lead 1, so the quotient V
    // stays integral.
    long L = N - 1;
    ZVec nsh(static_cast<size_t>(L) + 1), den(static_cast<size_t>(L) + 1);
    for (long j = 0; j <= L; ++j) {
        nsh[j] = num[j + 1];
        den[j] = aa[j + 1] * (j + 1);
    }
    ZVec V(static_cast<size_t>(L) + 1);
    for (long k = 0; k <= L; ++k) V[k] = nsh[k] - conv_at(den, V, k, 1);
    ZVec ainv = zrevert(ZVec(aa.begin(), aa.begin() + L + 1));
    ZVec Q = zcompose(V, ainv, L);
    if (Q[0] != 0) throw std::logic_error("extract_Q: core series has constant term");
    for (long k = 0; k <= L; ++k)
        if (Q[k] < 0) throw std::logic_error("extract_Q: negative coefficient");
    return from_int_vec(Q, static_cast<int>(L));
}

} // namespace blockmaps
