#pragma once

#include <vector>

#include "birkhoff/types.hpp"

namespace birkhoff {

// All proper votes in lexicographic candidate order.
std::vector<Vote> enumerate_votes(const Config& cfg);

// Index of a proper vote in the lexicographic enumeration, without
// materializing it.
long long vote_index(const Config& cfg, const Vote& v);

// 0/1 configuration matrix: one row per (position, candidate) pair ordered
// (0,0)..(0,n-1),(1,0),...; one column per vote in lexicographic order.
struct IntMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<long long> a;

    long long& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    long long at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

IntMatrix config_matrix(const Config& cfg);

// Rank over the rationals (fraction-free elimination, exact).
int matrix_rank(IntMatrix m);

// Exact basis check helper: dimension of the intersection of row spaces etc.
// is derivable from ranks of stacked matrices; expose stacking for tests.
IntMatrix vstack(const IntMatrix& top, const IntMatrix& bottom);

// Model weights psi, r x n row-major, strictly positive where used.
using Weights = std::vector<double>;

// Normalizing constant Z(psi) = sum over proper votes of prod_j psi[j][v_j].
// Subset dynamic program, O(2^n * n); refuses n > 24.
double compute_Z(const Config& cfg, const Weights& psi);

// P(vote) under the model.
double vote_probability(const Config& cfg, const Weights& psi, const Vote& v);

// Marginal occupation probabilities m[j*n+k] = P(position j ranks candidate k).
std::vector<double> position_marginals(const Config& cfg, const Weights& psi);

}  // namespace birkhoff
