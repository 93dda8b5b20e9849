#include "blockmaps/random_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace blockmaps {

namespace {

double log2_bigint(const BigInt& v) {
    long e = 0;
    double m = mpz_get_d_2exp(&e, v.get_mpz_t());
    return std::log2(std::fabs(m)) + double(e);
}

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / double(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> x = a[i + k];
                std::complex<double> y = a[i + k + len / 2] * w;
                a[i + k] = x + y;
                a[i + k + len / 2] = x - y;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& v : a) v /= double(n);
}

// Nonnegative convolution; FFT noise below 1e-18 of the peak is swept to 0.
std::vector<double> conv_nonneg(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t la = a.size(), lb = b.size();
    const size_t lo = la + lb - 1;
    std::vector<double> out(lo, 0.0);
    if (la * lb <= (1u << 14)) {
        for (size_t i = 0; i < la; ++i) {
            if (a[i] == 0) continue;
            for (size_t j = 0; j < lb; ++j) out[i + j] += a[i] * b[j];
        }
    } else {
        size_t sz = 1;
        while (sz < lo) sz <<= 1;
        std::vector<std::complex<double>> fa(sz), fb(sz);
        for (size_t i = 0; i < la; ++i) fa[i] = a[i];
        for (size_t i = 0; i < lb; ++i) fb[i] = b[i];
        fft_inplace(fa, false);
        fft_inplace(fb, false);
        for (size_t i = 0; i < sz; ++i) fa[i] *= fb[i];
        fft_inplace(fa, true);
        for (size_t i = 0; i < lo; ++i) out[i] = fa[i].real();
    }
    double peak = 0;
    for (double v : out) peak = std::max(peak, v);
    const double floor_v = peak * 1e-18;
    for (double& v : out) v = (v < floor_v) ? 0.0 : v;
    return out;
}

void normalize(std::vector<double>& p) {
    double s = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(s > 0)) throw std::logic_error("pmf lost all mass");
    for (double& v : p) v /= s;
}

} // namespace

OffspringDist build_mu(const TruncSeries& B, const BSeriesEval& be, const ModelConstants& mc,
                       double u, YMode mode, long n_exact, long j_max) {
    if (!(u > 0)) throw std::domain_error("build_mu: weight must be positive");
    if (n_exact < 8 || j_max < n_exact) throw std::domain_error("build_mu: bad truncation orders");

    OffspringDist d;
    d.u = u;
    const int W = mc.work_digits;
    BigFixed yb = (mode == YMode::at_rho_B) ? mc.rho_B
                                            : solve_y_of_u(be, mc, BigFixed::from_double(u, W));
    d.y = yb.to_double();
    d.x = (yb / mc.rho_B).to_double();
    const double l2y = std::log2(d.y);
    const double l2x = std::log2(d.x);
    const double Kd = mc.K_b.to_double();

    const long n_head = std::min<long>(n_exact, B.order());
    d.n_exact_used = n_head;

    // Adaptive support: stop once the tail model is vanishing relative to the head.
    long cap = j_max;
    if (d.x < 1.0 - 1e-12) {
        long j = n_head + 1;
        while (j < j_max && u * Kd * std::exp2(double(j) * l2x) / (double(j) * double(j) * double(j)) > 1e-21)
            ++j;
        cap = j;
    }
    d.j_cap = cap;

    d.pmf.assign(cap + 1, 0.0);
    d.pmf[0] = 1.0;
    for (long j = 1; j <= std::min(n_head, cap); ++j) {
        const BigRat& c = B[j];
        d.pmf[j] = u * std::exp2(log2_bigint(c.get_num()) + double(j) * l2y);
    }
    for (long j = n_head + 1; j <= cap; ++j)
        d.pmf[j] = u * Kd * std::exp2(double(j) * l2x) / (double(j) * double(j) * double(j));

    auto B0 = be.eval(yb, 0);
    auto B1 = be.eval(yb, 1);
    d.normalizer = u * B0.value.to_double() + 1.0 - u;
    if (!(d.normalizer > 0)) throw std::logic_error("build_mu: nonpositive normalizer");
    const double mass = std::accumulate(d.pmf.begin(), d.pmf.end(), 0.0);
    d.renorm_defect = (mass - d.normalizer) / d.normalizer;
    if (std::fabs(d.renorm_defect) > 1e-6)
        throw std::runtime_error("build_mu: renormalization defect above bound: " +
                                 std::to_string(d.renorm_defect));
    for (double& v : d.pmf) v /= mass;

    double m1 = 0, m2 = 0;
    for (long j = 0; j <= cap; ++j) {
        m1 += double(j) * d.pmf[j];
        m2 += double(j) * double(j) * d.pmf[j];
    }
    d.mean_half = m1;
    d.var_half = m2 - m1 * m1;
    d.mean_closed = 2.0 * u * d.y * B1.value.to_double() / d.normalizer;
    return d;
}

ConditionedSampler::ConditionedSampler(OffspringDist mu, long n, SamplerOptions opts)
    : mu_(std::move(mu)), n_(n), opts_(opts) {
    if (n_ < 1) throw std::domain_error("ConditionedSampler: need n >= 1");
    const long cap = std::min<long>(mu_.j_cap, n_);
    nu_.assign(mu_.pmf.begin(), mu_.pmf.begin() + cap + 1);
    normalize(nu_);

    // Acceptance estimate for plain rejection: local CLT with the mean offset.
    double m1 = 0, m2 = 0;
    for (long j = 0; j <= cap; ++j) {
        m1 += double(j) * nu_[j];
        m2 += double(j) * double(j) * nu_[j];
    }
    const double v = std::max(m2 - m1 * m1, 1e-12);
    const double m = double(2 * n_ + 1);
    const double delta = double(n_) - m * m1;
    const double log_est = 0.5 * std::log(2.0 * M_PI * m * v) + delta * delta / (2.0 * m * v);
    est_attempts_ = (log_est > 600) ? 1e300 : std::exp(log_est);
}

bool ConditionedSampler::try_rejection(Rng& rng, TypeSeq& out) {
    // Alias table over nu_.
    const size_t K = nu_.size();
    std::vector<double> ap(K);
    std::vector<int> ai(K);
    {
        std::vector<double> scaled(K);
        std::vector<int> small, large;
        for (size_t i = 0; i < K; ++i) {
            scaled[i] = nu_[i] * double(K);
            (scaled[i] < 1.0 ? small : large).push_back(int(i));
        }
        while (!small.empty() && !large.empty()) {
            int s = small.back(); small.pop_back();
            int l = large.back(); large.pop_back();
            ap[s] = scaled[s];
            ai[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        for (int i : small) { ap[i] = 1.0; ai[i] = i; }
        for (int i : large) { ap[i] = 1.0; ai[i] = i; }
    }
    auto draw = [&](Rng& r) -> long {
        const size_t i = size_t(r.below(K));
        return (r.unit() < ap[i]) ? long(i) : long(ai[i]);
    };

    const long mlen = 2 * n_ + 1;
    out.resize(mlen);
    for (long attempt = 1; attempt <= opts_.rejection_cap; ++attempt) {
        last_attempts_ = attempt;
        long sum = 0;
        bool alive = true;
        for (long i = 0; i < mlen; ++i) {
            long j = draw(rng);
            sum += j;
            if (sum > n_) { alive = false; break; }
            out[i] = j;
        }
        if (alive && sum == n_) return true;
    }
    return false;
}

void ConditionedSampler::build_tables() {
    if (tables_built_) return;
    if (!opts_.supercritical_window && n_ > opts_.full_range_cap)
        throw std::domain_error("split sampler: full-range tables capped, n too large for this regime");

    double m1 = 0, m2 = 0;
    for (size_t j = 0; j < nu_.size(); ++j) {
        m1 += double(j) * nu_[j];
        m2 += double(j) * double(j) * nu_[j];
    }
    const double vj = std::max(m2 - m1 * m1, 1e-12);

    auto finish = [&](Pmf& t) {
        normalize(t.p);
        t.pmax = *std::max_element(t.p.begin(), t.p.end());
        const size_t K = t.p.size();
        t.alias_prob.assign(K, 1.0);
        t.alias_idx.assign(K, 0);
        std::vector<double> scaled(K);
        std::vector<int> small, large;
        for (size_t i = 0; i < K; ++i) {
            t.alias_idx[i] = int(i);
            scaled[i] = t.p[i] * double(K);
            (scaled[i] < 1.0 ? small : large).push_back(int(i));
        }
        while (!small.empty() && !large.empty()) {
            int s = small.back(); small.pop_back();
            int l = large.back(); large.pop_back();
            t.alias_prob[s] = scaled[s];
            t.alias_idx[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
    };

    auto build = [&](auto&& self, long m) -> void {
        if (tables_.count(m)) return;
        Pmf t;
        if (m == 1) {
            t.lo = 0;
            t.p = nu_;
        } else {
            const long m1h = (m + 1) / 2, m2h = m - m1h;
            self(self, m1h);
            self(self, m2h);
            const Pmf& a = tables_.at(m1h);
            const Pmf& b = tables_.at(m2h);
            t.lo = a.lo + b.lo;
            t.p = conv_nonneg(a.p, b.p);
        }
        // Crop to the working window.
        long lo_keep = 0, hi_keep = n_;
        if (opts_.supercritical_window) {
            const double center = double(m) * m1;
            const double hw = std::max(20.0 * std::sqrt(double(m) * vj), 256.0);
            lo_keep = std::max<long>(0, long(center - hw));
            hi_keep = std::min<long>(n_, long(center + hw) + 1);
        }
        lo_keep = std::max(lo_keep, t.lo);
        hi_keep = std::min(hi_keep, t.hi());
        if (lo_keep > hi_keep) throw std::logic_error("split tables: window emptied a pmf");
        if (lo_keep != t.lo || hi_keep != t.hi()) {
            std::vector<double> sl(t.p.begin() + (lo_keep - t.lo), t.p.begin() + (hi_keep - t.lo) + 1);
            t.p = std::move(sl);
            t.lo = lo_keep;
        }
        finish(t);
        tables_.emplace(m, std::move(t));
    };

    const long mlen = 2 * n_ + 1;
    const long m1h = (mlen + 1) / 2, m2h = mlen - m1h;
    build(build, m1h);
    build(build, m2h);
    tables_built_ = true;
}

long ConditionedSampler::draw_s1(const Pmf& f1, const Pmf& f2, long s, Rng& rng) const {
    const long lo = std::max(f1.lo, s - f2.hi());
    const long hi = std::min(f1.hi(), s - f2.lo);
    if (lo > hi) throw std::logic_error("split sampler: infeasible node");
    const double f2max = f2.pmax;

    // Propose from f1, accept against f2: exact for the product law, O(1) in
    // the bulk. A condensation node (far-tail s) falls through to the scan.
    const size_t K = f1.p.size();
    for (int trial = 0; trial < 200; ++trial) {
        const size_t i = size_t(rng.below(K));
        const long s1 = f1.lo + long(rng.unit() < f1.alias_prob[i] ? long(i) : long(f1.alias_idx[i]));
        if (s1 < lo || s1 > hi) continue;
        const double w = f2.p[size_t(s - s1 - f2.lo)];
        if (rng.unit() * f2max <= w) return s1;
    }

    thread_local std::vector<double> cum;
    cum.assign(size_t(hi - lo + 1), 0.0);
    double tot = 0;
    for (long s1 = lo; s1 <= hi; ++s1) {
        tot += f1.p[size_t(s1 - f1.lo)] * f2.p[size_t(s - s1 - f2.lo)];
        cum[size_t(s1 - lo)] = tot;
    }
    if (!(tot > 0)) throw std::logic_error("split sampler: node with zero mass");
    const double r = rng.unit() * tot;
    const auto it = std::upper_bound(cum.begin(), cum.end(), r);
    return lo + long(std::min<std::ptrdiff_t>(it - cum.begin(), std::ptrdiff_t(cum.size()) - 1));
}

void ConditionedSampler::sample_split(long m, long s, Rng& rng, TypeSeq& out) const {
    if (m == 1) {
        out.push_back(s);
        return;
    }
    const long m1h = (m + 1) / 2, m2h = m - m1h;
    const Pmf& f1 = tables_.at(m1h);
    const Pmf& f2 = tables_.at(m2h);
    const long s1 = draw_s1(f1, f2, s, rng);
    sample_split(m1h, s1, rng, out);
    sample_split(m2h, s - s1, rng, out);
}

TypeSeq ConditionedSampler::sample(Rng& rng) {
    last_attempts_ = 0;
    last_used_split_ = false;
    const long mlen = 2 * n_ + 1;
    TypeSeq seq;

    bool have = false;
    const bool want_rejection =
        opts_.method == SampleMethod::rejection_only ||
        (opts_.method == SampleMethod::automatic && est_attempts_ <= double(opts_.rejection_cap));
    if (want_rejection && opts_.rejection_cap > 0) {
        have = try_rejection(rng, seq);
        if (!have && opts_.method == SampleMethod::rejection_only)
            throw std::runtime_error("conditioned sampler: retry cap exhausted without fallback");
    }
    if (!have) {
        build_tables();
        last_used_split_ = true;
        seq.clear();
        seq.reserve(mlen);
        sample_split(mlen, n_, rng, seq);
    }

    // Cycle lemma: rotate to start right after the first global minimum of
    // the prefix sums of (2j - 1); the result is the unique valid preorder.
    long sum = 0, best = 1, best_at = -1;
    for (long i = 0; i < mlen; ++i) {
        sum += 2 * seq[i] - 1;
        if (sum < best) { best = sum; best_at = i; }
    }
    if (sum != -1) throw std::logic_error("conditioned sampler: walk does not end at -1");
    TypeSeq rot(mlen);
    for (long i = 0; i < mlen; ++i) rot[i] = seq[size_t((best_at + 1 + i) % mlen)];
    return rot;
}

BlockSizeSample block_sizes_from(const TypeSeq& types) {
    BlockSizeSample out;
    for (long j : types) {
        out.n += j;
        if (j > 0) out.sizes.push_back(j);
    }
    std::sort(out.sizes.begin(), out.sizes.end(), std::greater<>());
    out.tree_height = tree_stats(types).height;
    return out;
}

TreeStats tree_stats(const TypeSeq& types) {
    TreeStats st;
    std::vector<long> rem;
    for (long j : types) {
        const long depth = long(rem.size()) + 1;
        st.height = std::max(st.height, depth);
        st.sum_sizes += j;
        if (j > 0) {
            ++st.n_blocks;
            rem.push_back(2 * j);
        } else {
            while (!rem.empty()) {
                if (--rem.back() > 0) break;
                rem.pop_back();
            }
        }
    }
    if (!rem.empty()) throw std::logic_error("tree stats: preorder sequence is not a tree");
    std::vector<long> sizes;
    sizes.reserve(size_t(st.n_blocks));
    for (long j : types)
        if (j > 0) sizes.push_back(j);
    const size_t keep = std::min<size_t>(8, sizes.size());
    std::partial_sort(sizes.begin(), sizes.begin() + keep, sizes.end(), std::greater<>());
    sizes.resize(keep);
    st.top_sizes = std::move(sizes);
    return st;
}

MullinWord decorate_tree(const TypeSeq& types, Rng& rng, int catalog_cap) {
    if (types.empty()) throw std::domain_error("decorate_tree: empty preorder");
    if (types.size() == 1) {
        if (types[0] != 0) throw std::logic_error("decorate_tree: malformed singleton");
        return "";
    }
    BlockTree bt;
    long total = 0;
    for (long j : types) total += j;
    bt.n_edges = total;

    auto pick_word = [&](long j) -> const MullinWord& {
        if (j > catalog_cap)
            throw std::domain_error("decorate_tree: block of size " + std::to_string(j) +
                                    " exceeds the catalog cap " + std::to_string(catalog_cap));
        const auto& words = catalog_2connected(int(j));
        return words[size_t(rng.below(words.size()))];
    };

    struct Frame {
        int node;
        long next;
    };
    std::vector<Frame> frames;
    {
        const long j0 = types[0];
        if (j0 <= 0) throw std::logic_error("decorate_tree: root must be a block");
        bt.nodes.push_back({pick_word(j0), std::vector<int>(size_t(2 * j0), -1)});
        frames.push_back({0, 0});
    }
    for (size_t i = 1; i < types.size(); ++i) {
        if (frames.empty()) throw std::logic_error("decorate_tree: preorder too long");
        const long j = types[i];
        const long corner = frames.back().next++;
        const int pnode = frames.back().node;
        if (j > 0) {
            const int nid = int(bt.nodes.size());
            bt.nodes.push_back({pick_word(j), std::vector<int>(size_t(2 * j), -1)});
            bt.nodes[size_t(pnode)].child[size_t(corner)] = nid;
            frames.push_back({nid, 0});
        }
        while (!frames.empty() &&
               frames.back().next == long(bt.nodes[size_t(frames.back().node)].child.size()))
            frames.pop_back();
    }
    if (!frames.empty()) throw std::logic_error("decorate_tree: preorder too short");
    return reconstruct_word(bt);
}

MullinWord sample_decorated_map(ConditionedSampler& sampler, Rng& rng, int catalog_cap) {
    TypeSeq types = sampler.sample(rng);
    return decorate_tree(types, rng, catalog_cap);
}

} // namespace blockmaps
