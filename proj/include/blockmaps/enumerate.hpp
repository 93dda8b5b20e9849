#pragma once

#include "blockmaps/series.hpp"
#include "blockmaps/upoly.hpp"

namespace blockmaps {

BigInt catalan(long n);

// Number of tree-rooted planar maps with n edges.
BigInt mullin_count(long n);

// Generating series of tree-rooted maps by edges, to z^N inclusive.
TruncSeries series_M(int N);

struct DfiniteReport {
    bool ok;
    int checked_to;  // residual verified for z^0 .. z^checked_to
    int first_bad;   // -1 when ok
};

// Forms the residual of the third-order linear differential equation with
// polynomial coefficients that annihilates the map series, and checks that
// every computable coefficient vanishes. An order-N input certifies the
// residual through z^(N-3).
DfiniteReport verify_dfinite(const TruncSeries& M);

// Block-count series B: the unique series with B(z M(z)^2) = M(z).
// Input must be the output of series_M (checked). Small orders go through
// the direct triangular solve against powers of zM^2; large orders use the
// differential recurrence transported through the substitution y = zM^2,
// which needs O(N^2) big-integer products instead of O(N^3).
TruncSeries extract_B(const TruncSeries& M);
TruncSeries extract_B_triangular(const TruncSeries& M);
TruncSeries extract_B_transport(int N);

// Series in z and u, u marking the number of 2-connected blocks. Solves
// M(z,u) = u B(z M(z,u)^2) + 1 - u order by order. Kept for small orders
// where the full polynomial table is wanted; beyond that use coeff_M_at_u.
BiSeries bivariate_M(int N);

// [z^n] M(z, u) for one fixed rational u, via single-coefficient extraction
// from the inverse substitution (a power of the shifted block series),
// avoiding any bivariate table. Needs B to order >= n.
BigRat coeff_M_at_u(const TruncSeries& B, const BigRat& u, long n);

struct SPSystem {
    TruncSeries A, Abar;  // rooted 2-connected maps by edges, and the mirror
    TruncSeries S, Sbar;  // series components
    TruncSeries P, Pbar;  // parallel components
};

// Series/parallel decomposition system for rooted 2-connected maps. All six
// series have nonnegative integer coefficients; the mirror symmetry
// S = Pbar, P = Sbar is asserted.
SPSystem series_parallel_system(int N);

// Core series Q: with V(y) = (B(y) - 1 - 2y - 2yA(y)) / (y A'(y)), returns
// Q = V composed with the compositional inverse of A, one order below the
// (equal) order of the inputs. Coefficients must come out nonnegative
// integers; anything else throws.
TruncSeries extract_Q(const TruncSeries& B, const TruncSeries& A);

// Compositional inverse of f (needs f[0] = 0 and f[1] = 1), same order,
// by coefficient extraction from powers of y/f.
TruncSeries revert_series(const TruncSeries& f);

} // namespace blockmaps
