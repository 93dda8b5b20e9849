#pragma once

#include "blockmaps/analytics.hpp"
#include "blockmaps/mapcraft.hpp"
#include "blockmaps/rng.hpp"
#include "blockmaps/series.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace blockmaps {

// Offspring law of the block tree: a node has 2j children with weight
// b_j y^j (times u when j > 0), normalized by uB(y)+1-u. Stored over the
// half-offspring j; the public support is the even numbers 2j.
struct OffspringDist {
    double u = 0;
    double y = 0;
    double x = 0;             // y / rho_B
    long n_exact_used = 0;    // exact b_j head length
    long j_cap = 0;           // truncation: support is j in [0, j_cap]
    double normalizer = 0;    // uB(y)+1-u
    double renorm_defect = 0; // relative defect of the truncated mass vs the normalizer
    double mean_half = 0;     // sum j pmf[j] (offspring mean is twice this)
    double mean_closed = 0;   // 2uyB'(y) / (uB(y)+1-u)
    double var_half = 0;      // variance of j
    std::vector<double> pmf;  // pmf[j], sums to 1
};

enum class YMode { at_rho_B, at_y_of_u };

// N_exact caps how many exact b_j feed the head (the series must hold them);
// beyond that the one-term tail model takes over. J_max bounds the support.
OffspringDist build_mu(const TruncSeries& B, const BSeriesEval& be, const ModelConstants& mc,
                       double u, YMode mode, long n_exact = 2000, long j_max = 1000000);

// Preorder half-offspring sequence of the conditioned block tree: types[i] = j
// means node i has 2j children; sum of types = n, length 2n+1, root first.
using TypeSeq = std::vector<long>;

enum class SampleMethod { automatic, rejection_only, split_only };

struct SamplerOptions {
    SampleMethod method = SampleMethod::automatic;
    long rejection_cap = 3000;        // attempts before the split sampler takes over
    bool supercritical_window = false; // window the split pmfs (light tails only)
    long full_range_cap = 200000;     // largest n for full-range split tables
};

// Draws (X_1..X_{2n+1}) iid from the offspring law conditioned on the total
// 2n, as half-offspring j with sum n, then rotates into a valid preorder
// (cycle lemma). Rejection first; on cap, an exact divide-and-conquer split
// over partial-sum tables (double precision, FFT convolutions).
class ConditionedSampler {
public:
    ConditionedSampler(OffspringDist mu, long n, SamplerOptions opts);

    TypeSeq sample(Rng& rng);

    // Diagnostics for the most recent sample() call.
    long last_attempts() const { return last_attempts_; }
    bool last_used_split() const { return last_used_split_; }

    const OffspringDist& dist() const { return mu_; }
    long n() const { return n_; }

private:
    struct Pmf {
        long lo = 0;
        double pmax = 0;
        std::vector<double> p;
        std::vector<double> alias_prob;
        std::vector<int> alias_idx;
        long hi() const { return lo + long(p.size()) - 1; }
    };

    bool try_rejection(Rng& rng, TypeSeq& out);
    void build_tables();
    void sample_split(long m, long s, Rng& rng, TypeSeq& out) const;
    long draw_s1(const Pmf& f1, const Pmf& f2, long s, Rng& rng) const;

    OffspringDist mu_;
    long n_;
    SamplerOptions opts_;
    std::vector<double> nu_;     // offspring pmf truncated at min(j_cap, n)
    double est_attempts_ = 0;
    bool tables_built_ = false;
    std::map<long, Pmf> tables_; // partial-sum pmfs for the halving sizes of 2n+1
    long last_attempts_ = 0;
    bool last_used_split_ = false;
};

// Block sizes (the j of the internal nodes) in decreasing order; sum = n.
struct BlockSizeSample {
    long n = 0;
    std::vector<long> sizes;
    long tree_height = 0;
};

BlockSizeSample block_sizes_from(const TypeSeq& types);

struct TreeStats {
    long height = 0;      // nodes on the longest root path
    long n_blocks = 0;    // internal nodes
    long sum_sizes = 0;   // equals n
    std::vector<long> top_sizes; // the 8 largest block sizes, decreasing
};

TreeStats tree_stats(const TypeSeq& types);

// Decorates the sampled tree with uniform catalog blocks and splices the
// word. Any block above catalog_cap edges raises a domain error naming the
// offending size: the sampler refuses rather than biasing.
MullinWord decorate_tree(const TypeSeq& types, Rng& rng, int catalog_cap);

MullinWord sample_decorated_map(ConditionedSampler& sampler, Rng& rng, int catalog_cap);

} // namespace blockmaps
