#pragma once

#include "blockmaps/bigrat.hpp"
#include "blockmaps/rng.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace blockmaps {

// Word over {A, a, B, b}: the tour letters of a tree-rooted map. A/a open and
// close spanning-tree edges, B/b the remaining edges. A word is valid iff the
// A/a letters and the B/b letters each balance like parentheses.
using MullinWord = std::string;

struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rooted map with a distinguished spanning tree. Half-edges are numbered in
// tour order starting from the root, so root == 0 always holds after decode.
struct TreeRootedMap {
    long n = 0;  // edges
    int num_vertices = 0;
    std::vector<int> alpha;      // pairs the two halves of each edge
    std::vector<int> sigma;      // next half-edge counterclockwise at the vertex
    std::vector<int> vertex_of;  // half-edge -> vertex
    std::vector<char> on_tree;   // half-edge -> spanning tree membership
    int root = 0;
};

TreeRootedMap decode_word(const MullinWord& w);
MullinWord encode_map(const TreeRootedMap& m);

// Every valid word with n edges; guarded to n <= 6 (counts grow like 16^n).
std::vector<MullinWord> enumerate_all(int n);

// Exactly uniform word with n edges: the tree-edge count k is drawn from its
// big-integer weight binom(2n,2k) Cat_k Cat_{n-k}, then the two balanced
// profiles and their interleaving are drawn uniformly (cycle rotation trick).
MullinWord sample_uniform(long n, Rng& rng);

// One node per block; child[t] is the pendant hanging off the corner after
// the block's t-th letter (-1 when nothing hangs there), so
// |child| == |word| at every node and words splice back together.
struct BlockNode {
    MullinWord word;
    std::vector<int> child;
};

struct BlockTree {
    std::vector<BlockNode> nodes;  // nodes[0] is the block of the root edge
    long n_edges = 0;
};

// Splits a map into its 2-connected blocks (bridges and loops count), each
// block keeping its own tour order, with pendant submaps attached per corner.
BlockTree block_decompose(const TreeRootedMap& m);

// Inverse of block_decompose up to the word level.
MullinWord reconstruct_word(const BlockTree& t);

long count_blocks(const TreeRootedMap& m);

// Edge counts per block, in the node order of block_decompose.
std::vector<long> block_sizes(const BlockTree& t);

// Words of all one-block maps with k edges, k <= 6. The counts match the
// block series coefficients b_k.
const std::vector<MullinWord>& catalog_2connected(int k);

std::vector<int> vertex_degrees(const TreeRootedMap& m);
std::vector<int> face_degrees(const TreeRootedMap& m);

// Height of the spanning tree read straight off the word: the maximum of
// (#A - #a) over prefixes.
int word_tree_height(const MullinWord& w);

// Spanning-tree heights of `replicas` uniform n-edge maps.
std::vector<int> walk_max_abscissa(long n, std::uint64_t seed, int replicas);

} // namespace blockmaps
