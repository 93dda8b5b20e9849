#include "blockmaps/mapcraft.hpp"

#include "blockmaps/enumerate.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <unordered_map>
#include <utility>

namespace blockmaps {

namespace {

// Half-edges of an edge share one id; eu/ev are its endpoints.
struct EdgeInfo {
    long E = 0;
    std::vector<int> eid_of;
    std::vector<int> eu, ev;
};

EdgeInfo build_edges(const TreeRootedMap& m) {
    const long L = 2 * m.n;
    EdgeInfo info;
    info.eid_of.assign(L, -1);
    for (long h = 0; h < L; ++h) {
        long a = m.alpha[h];
        if (a < 0 || a >= L || a == h || m.alpha[a] != h)
            throw CodecError("edge pairing is not a fixed-point-free involution");
        if (h < a) {
            info.eid_of[h] = info.eid_of[a] = int(info.E);
            info.eu.push_back(m.vertex_of[h]);
            info.ev.push_back(m.vertex_of[a]);
            ++info.E;
        }
    }
    return info;
}

// 2-connected components of the underlying multigraph; bridges and loops
// each form their own component. Returns the component count and fills
// comp_of_edge. Iterative, edge-marking variant: the tree edge into a vertex
// is already marked when its scan reaches it, which skips the parent edge
// while leaving parallel copies visible.
long bicomp(const TreeRootedMap& m, const EdgeInfo& info, std::vector<int>& comp_of_edge) {
    const int V = m.num_vertices;
    comp_of_edge.assign(info.E, -1);
    if (info.E == 0) return 0;

    std::vector<std::vector<std::pair<int, int>>> adj(V);
    for (long e = 0; e < info.E; ++e) {
        adj[info.eu[e]].push_back({info.ev[e], int(e)});
        adj[info.ev[e]].push_back({info.eu[e], int(e)});
    }

    std::vector<int> disc(V, -1), low(V, -1);
    std::vector<char> edone(info.E, 0);
    std::vector<int> estack;
    struct Frame {
        int v;
        int parent_eid;
        size_t it;
    };
    std::vector<Frame> st;
    long ncomp = 0;
    int timer = 0;

    st.push_back({0, -1, 0});
    disc[0] = low[0] = timer++;
    while (!st.empty()) {
        Frame& f = st.back();
        if (f.it < adj[f.v].size()) {
            auto [w, eid] = adj[f.v][f.it++];
            if (edone[eid]) continue;
            edone[eid] = 1;
            if (w == f.v) {
                comp_of_edge[eid] = int(ncomp++);
                continue;
            }
            estack.push_back(eid);
            if (disc[w] == -1) {
                disc[w] = low[w] = timer++;
                st.push_back({w, eid, 0});
            } else {
                low[f.v] = std::min(low[f.v], disc[w]);
            }
        } else {
            Frame done = f;
            st.pop_back();
            if (done.parent_eid != -1) {
                int u = st.back().v;
                low[u] = std::min(low[u], low[done.v]);
                if (low[done.v] >= disc[u]) {
                    while (true) {
                        int e = estack.back();
                        estack.pop_back();
                        comp_of_edge[e] = int(ncomp);
                        if (e == done.parent_eid) break;
                    }
                    ++ncomp;
                }
            }
        }
    }
    for (int v = 0; v < V; ++v)
        if (disc[v] == -1) throw CodecError("map is not connected");
    if (!estack.empty()) throw CodecError("component stack not drained");
    return ncomp;
}

// Inverse-CDF table for the tree-edge count of a uniform n-edge word:
// weight(k) = binom(2n, 2k) Cat_k Cat_{n-k}, maintained by the exact ratio
// weight(k+1) = weight(k) (n-k)(n-k+1) / ((k+1)(k+2)). Only every stride-th
// prefix sum is kept; a draw recomputes at most one stride of weights.
struct KTable {
    long n = 0;
    long stride = 1;
    BigInt total;
    std::vector<BigInt> ckpt; // ckpt[i] = sum of weights below k = i*stride
};

BigInt k_weight(long n, long k) {
    return binomial(2 * n, 2 * k) * catalan(k) * catalan(n - k);
}

void ratio_step(BigInt& w, long n, long k) {
    w *= (n - k) * (n - k + 1);
    mpz_divexact_ui(w.get_mpz_t(), w.get_mpz_t(), (unsigned long)((k + 1) * (k + 2)));
}

const KTable& k_table(long n) {
    static std::map<long, KTable> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> lk(mx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (cache.size() > 4) cache.erase(cache.begin());

    KTable t;
    t.n = n;
    t.stride = std::max<long>(1, n / 512);
    BigInt w = catalan(n); // weight at k = 0
    BigInt prefix = 0;
    for (long k = 0; k <= n; ++k) {
        if (k % t.stride == 0) t.ckpt.push_back(prefix);
        prefix += w;
        if (k < n) ratio_step(w, n, k);
    }
    t.total = prefix;
    if (t.total != catalan(n) * catalan(n + 1))
        throw std::logic_error("tree-edge weights do not sum to the map count");
    return cache.emplace(n, std::move(t)).first->second;
}

long draw_k(long n, Rng& rng) {
    const KTable& t = k_table(n);
    BigInt r = below_big(rng, t.total);
    // Largest checkpoint at or below r.
    size_t lo = 0, hi = t.ckpt.size();
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (t.ckpt[mid] <= r) lo = mid; else hi = mid;
    }
    long k = long(lo) * t.stride;
    r -= t.ckpt[lo];
    BigInt w = k_weight(n, k);
    while (r >= w) {
        r -= w;
        ratio_step(w, n, k);
        ++k;
        if (k > n) throw std::logic_error("tree-edge draw overran its table");
    }
    return k;
}

// Uniform balanced profile with p pairs via the cycle rotation: p rises and
// p+1 falls shuffled uniformly have exactly one rotation whose proper
// prefixes stay nonnegative, and dropping its final fall is a bijection onto
// profiles.
std::vector<char> dyck_profile(long p, Rng& rng) {
    if (p == 0) return {};
    const long L = 2 * p + 1;
    std::vector<int> a(L, -1);
    for (long i = 0; i < p; ++i) a[i] = 1;
    for (long i = L - 1; i > 0; --i) std::swap(a[i], a[rng.below(std::uint64_t(i + 1))]);
    long sum = 0, best = 1, best_at = -1;
    for (long i = 0; i < L; ++i) {
        sum += a[i];
        if (sum < best) { best = sum; best_at = i; }
    }
    std::vector<char> out;
    out.reserve(2 * p);
    for (long i = 1; i < L; ++i) out.push_back(a[(best_at + i) % L] == 1 ? 1 : 0);
    return out;
}

} // namespace

TreeRootedMap decode_word(const MullinWord& w) {
    const long L = long(w.size());
    if (L % 2 != 0) throw CodecError("word length is odd");
    TreeRootedMap m;
    m.n = L / 2;
    m.alpha.assign(L, -1);
    m.sigma.assign(L, -1);
    m.vertex_of.assign(L, -1);
    m.on_tree.assign(L, 0);

    std::vector<std::vector<int>> rings(1);
    std::vector<int> tree_stk, chord_stk;
    int cur = 0;
    for (long t = 0; t < L; ++t) {
        m.vertex_of[t] = cur;
        rings[cur].push_back(int(t));
        switch (w[t]) {
        case 'A':
            m.on_tree[t] = 1;
            tree_stk.push_back(int(t));
            rings.emplace_back();
            cur = int(rings.size()) - 1;
            break;
        case 'a': {
            if (tree_stk.empty()) throw CodecError("unmatched tree closer");
            m.on_tree[t] = 1;
            int ho = tree_stk.back();
            tree_stk.pop_back();
            m.alpha[t] = ho;
            m.alpha[ho] = int(t);
            cur = m.vertex_of[ho];
            break;
        }
        case 'B':
            chord_stk.push_back(int(t));
            break;
        case 'b': {
            if (chord_stk.empty()) throw CodecError("unmatched chord closer");
            int ho = chord_stk.back();
            chord_stk.pop_back();
            m.alpha[t] = ho;
            m.alpha[ho] = int(t);
            break;
        }
        default:
            throw CodecError("letter outside the A/a/B/b alphabet");
        }
    }
    if (!tree_stk.empty() || !chord_stk.empty()) throw CodecError("unclosed letters at end of word");
    if (cur != 0) throw CodecError("tour did not return to the root");
    m.num_vertices = int(rings.size());
    for (const auto& r : rings)
        for (size_t i = 0; i < r.size(); ++i) m.sigma[r[i]] = r[(i + 1) % r.size()];
    return m;
}

MullinWord encode_map(const TreeRootedMap& m) {
    const long L = 2 * m.n;
    if (long(m.alpha.size()) != L || long(m.sigma.size()) != L ||
        long(m.vertex_of.size()) != L || long(m.on_tree.size()) != L)
        throw CodecError("permutation arrays disagree with the edge count");
    if (L == 0) return "";
    for (long h = 0; h < L; ++h) {
        long a = m.alpha[h];
        if (a < 0 || a >= L || a == h || m.alpha[a] != h)
            throw CodecError("edge pairing is not a fixed-point-free involution");
        if (m.sigma[h] < 0 || m.sigma[h] >= L) throw CodecError("vertex rotation out of range");
        if (m.on_tree[a] != m.on_tree[h]) throw CodecError("tree marks disagree across an edge");
    }

    MullinWord w;
    w.reserve(L);
    std::vector<char> seen(L, 0);
    long h = m.root;
    for (long step = 0; step < L; ++step) {
        if (h < 0 || h >= L || seen[h]) throw CodecError("tour is not a single cycle over half-edges");
        seen[h] = 1;
        bool first = !seen[m.alpha[h]];
        if (m.on_tree[h]) {
            w += first ? 'A' : 'a';
            h = m.sigma[m.alpha[h]];
        } else {
            w += first ? 'B' : 'b';
            h = m.sigma[h];
        }
    }
    if (h != m.root) throw CodecError("tour does not close at the root");
    return w;
}

std::vector<MullinWord> enumerate_all(int n) {
    if (n < 0 || n > 6) throw std::domain_error("enumerate_all: edge count outside [0, 6]");
    std::vector<MullinWord> out;
    std::string cur;
    const long L = 2L * n;
    // open letters must fit in the remaining positions with matching parity
    auto fits = [&](long open, long rem) { return open <= rem && (rem - open) % 2 == 0; };
    auto rec = [&](auto&& self, long oa, long ob) -> void {
        long rem = L - long(cur.size());
        if (rem == 0) {
            out.push_back(cur);
            return;
        }
        if (fits(oa + 1 + ob, rem - 1)) {
            cur += 'A';
            self(self, oa + 1, ob);
            cur.pop_back();
        }
        if (oa > 0 && fits(oa - 1 + ob, rem - 1)) {
            cur += 'a';
            self(self, oa - 1, ob);
            cur.pop_back();
        }
        if (fits(oa + ob + 1, rem - 1)) {
            cur += 'B';
            self(self, oa, ob + 1);
            cur.pop_back();
        }
        if (ob > 0 && fits(oa + ob - 1, rem - 1)) {
            cur += 'b';
            self(self, oa, ob - 1);
            cur.pop_back();
        }
    };
    rec(rec, 0, 0);
    return out;
}

MullinWord sample_uniform(long n, Rng& rng) {
    if (n < 0) throw std::domain_error("sample_uniform: negative edge count");
    if (n == 0) return "";
    const long k = draw_k(n, rng);
    std::vector<char> tree_prof = dyck_profile(k, rng);
    std::vector<char> chord_prof = dyck_profile(n - k, rng);

    // Uniform 2k-subset of the 2n positions hosts the tree letters in order.
    const long L = 2 * n;
    std::vector<int> idx(L);
    for (long i = 0; i < L; ++i) idx[i] = int(i);
    for (long i = 0; i < 2 * k; ++i) {
        long j = i + long(rng.below(std::uint64_t(L - i)));
        std::swap(idx[i], idx[j]);
    }
    std::vector<char> is_tree(L, 0);
    for (long i = 0; i < 2 * k; ++i) is_tree[idx[i]] = 1;

    MullinWord w(L, '?');
    long it = 0, ic = 0;
    for (long p = 0; p < L; ++p) {
        if (is_tree[p]) w[p] = tree_prof[it++] ? 'A' : 'a';
        else w[p] = chord_prof[ic++] ? 'B' : 'b';
    }
    return w;
}

BlockTree block_decompose(const TreeRootedMap& m) {
    BlockTree tree;
    tree.n_edges = m.n;
    if (m.n == 0) return tree;

    EdgeInfo info = build_edges(m);
    std::vector<int> comp_of_edge;
    long ncomp = bicomp(m, info, comp_of_edge);
    std::vector<long> comp_edges(ncomp, 0);
    for (long e = 0; e < info.E; ++e) ++comp_edges[comp_of_edge[e]];

    MullinWord w = encode_map(m);

    struct Frame {
        int node;
        int comp;
        long seen, target;
    };
    std::vector<Frame> frames;
    std::unordered_map<int, int> open_at; // component -> frame position

    const long L = 2 * m.n;
    for (long t = 0; t < L; ++t) {
        const char letter = w[t];
        const int c = comp_of_edge[info.eid_of[t]];
        auto it = open_at.find(c);
        if (it != open_at.end()) {
            // Back in an open block: everything stacked above it must be a
            // finished pendant, or the blocks would interleave.
            while (int(frames.size()) - 1 > it->second) {
                const Frame& top = frames.back();
                if (top.seen != top.target) throw std::logic_error("block splice: interleaved blocks");
                open_at.erase(top.comp);
                frames.pop_back();
            }
            Frame& f = frames.back();
            tree.nodes[f.node].word += letter;
            tree.nodes[f.node].child.push_back(-1);
            ++f.seen;
        } else {
            const int nid = int(tree.nodes.size());
            tree.nodes.push_back({MullinWord(1, letter), {-1}});
            if (!frames.empty()) {
                BlockNode& parent = tree.nodes[frames.back().node];
                if (parent.child.back() != -1) throw std::logic_error("block splice: corner already taken");
                parent.child.back() = nid;
            } else if (t != 0) {
                throw std::logic_error("block splice: dangling block");
            }
            frames.push_back({nid, c, 1, 2 * comp_edges[c]});
            open_at[c] = int(frames.size()) - 1;
        }
    }
    for (const Frame& f : frames)
        if (f.seen != f.target) throw std::logic_error("block splice: unfinished block");
    if (long(tree.nodes.size()) != ncomp) throw std::logic_error("block splice: node count mismatch");
    return tree;
}

MullinWord reconstruct_word(const BlockTree& t) {
    MullinWord out;
    if (t.nodes.empty()) return out;
    out.reserve(2 * t.n_edges);
    std::vector<std::pair<int, size_t>> st;
    st.push_back({0, 0});
    while (!st.empty()) {
        auto& top = st.back();
        const BlockNode& nd = t.nodes[top.first];
        if (top.second >= nd.word.size()) {
            st.pop_back();
            continue;
        }
        const size_t i = top.second++;
        out += nd.word[i];
        const int c = nd.child[i];
        if (c >= 0) st.push_back({c, 0});
    }
    if (long(out.size()) != 2 * t.n_edges) throw std::logic_error("reconstruct: length mismatch");
    return out;
}

long count_blocks(const TreeRootedMap& m) {
    if (m.n == 0) return 0;
    EdgeInfo info = build_edges(m);
    std::vector<int> comp_of_edge;
    return bicomp(m, info, comp_of_edge);
}

std::vector<long> block_sizes(const BlockTree& t) {
    std::vector<long> out;
    out.reserve(t.nodes.size());
    for (const auto& nd : t.nodes) out.push_back(long(nd.word.size()) / 2);
    return out;
}

const std::vector<MullinWord>& catalog_2connected(int k) {
    if (k < 1 || k > 6) throw std::domain_error("catalog_2connected: edge count outside [1, 6]");
    static std::vector<std::vector<MullinWord>> cache(7);
    static std::mutex mx;
    std::lock_guard<std::mutex> lk(mx);
    if (cache[k].empty()) {
        for (const MullinWord& w : enumerate_all(k))
            if (count_blocks(decode_word(w)) == 1) cache[k].push_back(w);
    }
    return cache[k];
}

std::vector<int> vertex_degrees(const TreeRootedMap& m) {
    std::vector<int> deg(m.num_vertices, 0);
    for (long h = 0; h < 2 * m.n; ++h) ++deg[m.vertex_of[h]];
    return deg;
}

std::vector<int> face_degrees(const TreeRootedMap& m) {
    const long L = 2 * m.n;
    std::vector<char> seen(L, 0);
    std::vector<int> out;
    for (long h = 0; h < L; ++h) {
        if (seen[h]) continue;
        int len = 0;
        long x = h;
        while (!seen[x]) {
            seen[x] = 1;
            ++len;
            x = m.sigma[m.alpha[x]];
        }
        out.push_back(len);
    }
    if (m.n == 0) out.push_back(0);
    return out;
}

int word_tree_height(const MullinWord& w) {
    int h = 0, best = 0;
    for (char c : w) {
        if (c == 'A') ++h;
        else if (c == 'a') --h;
        if (h > best) best = h;
    }
    return best;
}

std::vector<int> walk_max_abscissa(long n, std::uint64_t seed, int replicas) {
    std::vector<int> out;
    out.reserve(replicas);
    for (int r = 0; r < replicas; ++r) {
        Rng rng(seed, std::uint64_t(r));
        out.push_back(word_tree_height(sample_uniform(n, rng)));
    }
    return out;
}

} // namespace blockmaps
