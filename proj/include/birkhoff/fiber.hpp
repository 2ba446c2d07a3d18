#pragma once

#include <map>
#include <utility>
#include <vector>

#include "birkhoff/types.hpp"

namespace birkhoff {

// Fiber element: frequency vector over proper votes, vote -> positive count.
// Total mass is the dataset size N; map order is the canonical order.
using FiberElement = std::map<Vote, int>;

FiberElement to_fiber_element(const Dataset& d);
Dataset to_dataset(const Config& cfg, const FiberElement& x);
SuffStat fiber_element_stat(int n, int r, const FiberElement& x);

// Degree of the move x - y: sum of the positive part.
int move_degree_between(const FiberElement& x, const FiberElement& y);

// All frequency vectors x >= 0 with A x = t, sorted. Requires nonnegative
// entries and every position row summing to t.N; refuses t.N * t.r > 30.
std::vector<FiberElement> enumerate_fiber(const SuffStat& t);

// Per-position candidate multisets of a two- or three-vote statistic.
struct BlockStat {
    int n = 0;
    int r = 0;
    int N = 0;
    // blocks[j]: sorted multiset of size N over candidates 0..n-1.
    std::vector<std::vector<int>> blocks;

    friend auto operator<=>(const BlockStat&, const BlockStat&) = default;
};

BlockStat block_stat(const SuffStat& t);
SuffStat suff_stat_of(const BlockStat& m);
// True iff some dataset realizes m: each candidate appears at most N times.
bool block_stat_valid(const BlockStat& m);

// Intersection graph of the blocks: vertices are positions, an edge joins two
// positions whose blocks share a candidate.
struct BlockGraph {
    int r = 0;
    std::vector<std::pair<int, int>> edges;
    // Connected components over all vertices, each sorted, listed by minimum.
    std::vector<std::vector<int>> components;
    // Components containing at least one non-constant block; a constant block
    // {k,...,k} forces the same cell into every vote and never splits a fiber.
    int L = 0;
};

BlockGraph block_graph(const BlockStat& m);

// Two-vote fiber size 2^(L-1); all-constant blocks (L = 0) give one element.
long long two_vote_fiber_size(const BlockStat& m);

// Graph on fiber elements with edges between elements differing by a move of
// degree <= max_degree.
struct FiberGraph {
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> components;
    int component_count = 0;
};

FiberGraph fiber_graph(const std::vector<FiberElement>& fiber, int max_degree);

// Minimum of the block sequence over candidate relabelings and position
// permutations; ties in fresh-label choice resolved by exact search.
BlockStat canonical_block_stat(const BlockStat& m);

// Pairs (position permutation, relabeling) fixing m.
long long block_stat_symmetries(const BlockStat& m);

// Equivalence class of N-vote statistics with connected block graph under
// relabeling x position permutation, over exactly n_M candidates.
struct EquivClass {
    BlockStat rep;
    long long size = 0;  // labeled statistics in the class
    int n_M = 0;         // candidates appearing in rep
    int N_M = 0;         // fiber graph components under degree-2 moves
    long long fiber_size = 0;
    bool needs_degree3 = false;  // N_M >= 2
    bool indispensable = false;  // two-element fiber split by a degree-3 move
};

// All classes with N votes (2 or 3) and n_M in [n_lo, n_hi], sorted by
// (n_M, representative). Desk-scale guard: r <= 4 for N = 3, r <= 5 for N = 2.
std::vector<EquivClass> classify_equiv(int r, int N, int n_lo, int n_hi);

struct ClassSizeRow {
    int r = 0;
    int n_M = 0;
    int N_M = 0;
    long long size = 0;  // labeled statistics summed over classes

    friend auto operator<=>(const ClassSizeRow&, const ClassSizeRow&) = default;
};

// Three-vote class sizes aggregated by (n_M, N_M), connected block graphs.
std::vector<ClassSizeRow> class_size_table(int r);

}  // namespace birkhoff
