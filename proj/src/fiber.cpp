#include "birkhoff/fiber.hpp"

#include <algorithm>
#include <numeric>

#include "birkhoff/errors.hpp"

namespace birkhoff {

namespace {

long long factorial(int k) {
    long long f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

struct Dsu {
    std::vector<int> parent;

    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
    std::vector<std::vector<int>> components() {
        std::vector<std::vector<int>> by_root(parent.size());
        for (int v = 0; v < static_cast<int>(parent.size()); ++v) by_root[find(v)].push_back(v);
        std::vector<std::vector<int>> out;
        for (auto& c : by_root)
            if (!c.empty()) out.push_back(std::move(c));
        std::sort(out.begin(), out.end());
        return out;
    }
};

void check_stat_shape(const SuffStat& t) {
    if (t.n < 1 || t.r < 1 || t.N < 0 || t.t.size() != static_cast<size_t>(t.r) * t.n)
        throw PreconditionError("malformed sufficient statistic");
    if (static_cast<long long>(t.N) * t.r > 30)
        throw TooLargeError("fiber machinery limited to N * r <= 30");
    for (int v : t.t)
        if (v < 0) throw PreconditionError("sufficient statistic must be nonnegative");
    for (int j = 0; j < t.r; ++j) {
        int sum = 0;
        for (int k = 0; k < t.n; ++k) sum += t.at(j, k);
        if (sum != t.N) throw PreconditionError("every position row must sum to N");
    }
}

void check_blocks(const BlockStat& m) {
    if (m.n < 1 || m.r < 1 || m.N < 1 || m.blocks.size() != static_cast<size_t>(m.r))
        throw PreconditionError("malformed block statistic");
    for (const auto& b : m.blocks) {
        if (b.size() != static_cast<size_t>(m.N) || !std::is_sorted(b.begin(), b.end()))
            throw PreconditionError("each block must be a sorted multiset of size N");
        for (int k : b)
            if (k < 0 || k >= m.n) throw PreconditionError("block candidate out of range");
    }
}

bool blocks_intersect(const std::vector<int>& a, const std::vector<int>& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) ++i;
        else ++j;
    }
    return false;
}

bool constant_block(const std::vector<int>& b) { return b.front() == b.back(); }

// Lexicographically smallest flattening of the given block sequence over all
// candidate relabelings. Fresh labels are issued in first-use order; branches
// keep every partial assignment still able to realize the minimum.
std::vector<int> lexmin_relabel_flat(const std::vector<const std::vector<int>*>& blocks,
                                     int symbols) {
    struct Branch {
        std::vector<int> map;  // old label -> new label, -1 unassigned
        int used = 0;
    };
    std::vector<Branch> branches{{std::vector<int>(symbols, -1), 0}};
    std::vector<int> flat;
    std::vector<int> best, tuple, perm;
    for (const auto* bp : blocks) {
        const auto& b = *bp;
        std::vector<Branch> next;
        best.clear();
        for (const auto& br : branches) {
            perm.clear();
            for (int s : b)
                if (br.map[s] < 0 && (perm.empty() || perm.back() != s)) perm.push_back(s);
            do {
                tuple.clear();
                for (int s : b) {
                    int v = br.map[s];
                    if (v < 0)
                        v = br.used +
                            static_cast<int>(std::find(perm.begin(), perm.end(), s) - perm.begin());
                    tuple.push_back(v);
                }
                std::sort(tuple.begin(), tuple.end());
                if (best.empty() || tuple < best) {
                    best = tuple;
                    next.clear();
                } else if (tuple != best) {
                    continue;
                }
                Branch nb = br;
                for (size_t i = 0; i < perm.size(); ++i) nb.map[perm[i]] = nb.used + static_cast<int>(i);
                nb.used += static_cast<int>(perm.size());
                next.push_back(std::move(nb));
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        std::sort(next.begin(), next.end(),
                  [](const Branch& a, const Branch& b2) { return a.map < b2.map; });
        next.erase(std::unique(next.begin(), next.end(),
                               [](const Branch& a, const Branch& b2) { return a.map == b2.map; }),
                   next.end());
        branches = std::move(next);
        flat.insert(flat.end(), best.begin(), best.end());
    }
    return flat;
}

}  // namespace

FiberElement to_fiber_element(const Dataset& d) {
    FiberElement x;
    for (const auto& v : d.votes) {
        if (!v.is_proper()) throw PreconditionError("fiber elements hold proper votes only");
        ++x[v];
    }
    return x;
}

Dataset to_dataset(const Config& cfg, const FiberElement& x) {
    Dataset d{cfg, {}};
    for (const auto& [v, c] : x) {
        if (c <= 0) throw PreconditionError("fiber element counts must be positive");
        if (v.size() != cfg.r()) throw PreconditionError("vote length does not match config");
        for (int i = 0; i < c; ++i) d.votes.push_back(v);
    }
    return d;
}

SuffStat fiber_element_stat(int n, int r, const FiberElement& x) {
    SuffStat t{n, r, 0, std::vector<int>(static_cast<size_t>(r) * n, 0)};
    for (const auto& [v, c] : x) {
        if (v.size() != r) throw PreconditionError("vote length does not match r");
        t.N += c;
        for (int j = 0; j < r; ++j) {
            int k = v.at(j).plus();
            if (k >= n) throw PreconditionError("vote candidate out of range");
            t.t[static_cast<size_t>(j) * n + k] += c;
        }
    }
    return t;
}

int move_degree_between(const FiberElement& x, const FiberElement& y) {
    int deg = 0;
    auto it = y.begin();
    for (const auto& [v, c] : x) {
        while (it != y.end() && it->first < v) ++it;
        int yc = (it != y.end() && it->first == v) ? it->second : 0;
        if (c > yc) deg += c - yc;
    }
    return deg;
}

std::vector<FiberElement> enumerate_fiber(const SuffStat& t) {
    check_stat_shape(t);
    const int n = t.n, r = t.r, N = t.N;
    std::vector<int> rem = t.t;
    std::vector<int> total(n, 0);
    for (int j = 0; j < r; ++j)
        for (int k = 0; k < n; ++k) total[k] += rem[static_cast<size_t>(j) * n + k];
    for (int k = 0; k < n; ++k)
        if (total[k] > N) return {};

    std::vector<FiberElement> out;
    std::vector<std::vector<int>> chosen;
    chosen.reserve(N);  // pointers into the stack of votes stay valid

    auto place = [&](auto&& self, int votes_left) -> void {
        if (votes_left == 0) {
            FiberElement x;
            for (const auto& v : chosen) ++x[Vote::of(v)];
            out.push_back(std::move(x));
            return;
        }
        const std::vector<int>* low = chosen.empty() ? nullptr : &chosen.back();
        std::vector<int> cur(r);    // per vote, inner votes must not clobber it
        std::vector<char> used(n, 0);
        auto fill = [&](auto&& vself, int j, bool tight) -> void {
            if (j == r) {
                // A candidate still owed more slots than votes remain cannot
                // be completed; every surviving branch stays realizable.
                for (int k = 0; k < n; ++k)
                    if (total[k] > votes_left - 1) return;
                chosen.push_back(cur);
                self(self, votes_left - 1);
                chosen.pop_back();
                return;
            }
            int start = (tight && low) ? (*low)[j] : 0;
            for (int k = start; k < n; ++k) {
                size_t cell = static_cast<size_t>(j) * n + k;
                if (used[k] || rem[cell] == 0) continue;
                used[k] = 1;
                --rem[cell];
                --total[k];
                cur[j] = k;
                vself(vself, j + 1, tight && low && k == (*low)[j]);
                used[k] = 0;
                ++rem[cell];
                ++total[k];
            }
        };
        fill(fill, 0, true);
    };
    place(place, N);
    std::sort(out.begin(), out.end());
    return out;
}

BlockStat block_stat(const SuffStat& t) {
    check_stat_shape(t);
    BlockStat m{t.n, t.r, t.N, std::vector<std::vector<int>>(t.r)};
    for (int j = 0; j < t.r; ++j) {
        m.blocks[j].reserve(t.N);
        for (int k = 0; k < t.n; ++k)
            for (int c = 0; c < t.at(j, k); ++c) m.blocks[j].push_back(k);
    }
    return m;
}

SuffStat suff_stat_of(const BlockStat& m) {
    check_blocks(m);
    SuffStat t{m.n, m.r, m.N, std::vector<int>(static_cast<size_t>(m.r) * m.n, 0)};
    for (int j = 0; j < m.r; ++j)
        for (int k : m.blocks[j]) ++t.t[static_cast<size_t>(j) * m.n + k];
    return t;
}

bool block_stat_valid(const BlockStat& m) {
    check_blocks(m);
    std::vector<int> total(m.n, 0);
    for (const auto& b : m.blocks)
        for (int k : b)
            if (++total[k] > m.N) return false;
    return true;
}

BlockGraph block_graph(const BlockStat& m) {
    check_blocks(m);
    BlockGraph g;
    g.r = m.r;
    Dsu dsu(m.r);
    for (int i = 0; i < m.r; ++i)
        for (int j = i + 1; j < m.r; ++j)
            if (blocks_intersect(m.blocks[i], m.blocks[j])) {
                g.edges.emplace_back(i, j);
                dsu.unite(i, j);
            }
    g.components = dsu.components();
    for (const auto& comp : g.components) {
        bool live = false;
        for (int v : comp) live = live || !constant_block(m.blocks[v]);
        if (live) ++g.L;
    }
    return g;
}

long long two_vote_fiber_size(const BlockStat& m) {
    if (m.N != 2) throw PreconditionError("two-vote law needs N = 2");
    if (!block_stat_valid(m)) throw PreconditionError("not a realizable two-vote statistic");
    int L = block_graph(m).L;
    return L == 0 ? 1 : 1LL << (L - 1);
}

FiberGraph fiber_graph(const std::vector<FiberElement>& fiber, int max_degree) {
    if (max_degree < 1) throw PreconditionError("move degree bound must be positive");
    FiberGraph g;
    int f = static_cast<int>(fiber.size());
    Dsu dsu(f);
    for (int i = 0; i < f; ++i)
        for (int j = i + 1; j < f; ++j)
            if (move_degree_between(fiber[i], fiber[j]) <= max_degree) {
                g.edges.emplace_back(i, j);
                dsu.unite(i, j);
            }
    g.components = dsu.components();
    g.component_count = static_cast<int>(g.components.size());
    return g;
}

BlockStat canonical_block_stat(const BlockStat& m) {
    check_blocks(m);
    if (m.r > 6) throw TooLargeError("canonical form limited to r <= 6");
    std::vector<int> order(m.r);
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> best;
    do {
        std::vector<const std::vector<int>*> perm;
        perm.reserve(m.r);
        for (int j : order) perm.push_back(&m.blocks[j]);
        std::vector<int> flat = lexmin_relabel_flat(perm, m.n);
        if (best.empty() || flat < best) best = std::move(flat);
    } while (std::next_permutation(order.begin(), order.end()));

    BlockStat rep{m.n, m.r, m.N, std::vector<std::vector<int>>(m.r)};
    for (int j = 0; j < m.r; ++j)
        rep.blocks[j].assign(best.begin() + static_cast<size_t>(j) * m.N,
                             best.begin() + static_cast<size_t>(j + 1) * m.N);
    return rep;
}

long long block_stat_symmetries(const BlockStat& m) {
    check_blocks(m);
    if (m.r > 6) throw TooLargeError("symmetry count limited to r <= 6");
    std::vector<int> present;
    {
        std::vector<char> seen(m.n, 0);
        for (const auto& b : m.blocks)
            for (int k : b) seen[k] = 1;
        for (int k = 0; k < m.n; ++k)
            if (seen[k]) present.push_back(k);
    }
    auto profile = [&](int s, const std::vector<int>& order) {
        std::vector<int> p;
        p.reserve(m.r);
        for (int j : order)
            p.push_back(static_cast<int>(std::count(m.blocks[j].begin(), m.blocks[j].end(), s)));
        return p;
    };
    std::vector<int> identity(m.r);
    std::iota(identity.begin(), identity.end(), 0);
    // A relabeling fixes the permuted sequence exactly when it matches symbols
    // profile-for-profile, so each permutation contributes the product of
    // factorials of profile multiplicities (or nothing on a mismatch).
    std::map<std::vector<int>, int> id_groups;
    for (int s : present) ++id_groups[profile(s, identity)];

    long long count = 0;
    std::vector<int> order = identity;
    do {
        std::map<std::vector<int>, int> groups;
        for (int s : present) ++groups[profile(s, order)];
        if (groups == id_groups) {
            long long ways = 1;
            for (const auto& [p, c] : groups) ways *= factorial(c);
            count += ways;
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return count;
}

std::vector<EquivClass> classify_equiv(int r, int N, int n_lo, int n_hi) {
    if (N != 2 && N != 3) throw PreconditionError("classification covers N = 2 and N = 3 only");
    if (r < 1) throw PreconditionError("r must be positive");
    if ((N == 3 && r > 4) || (N == 2 && r > 5))
        throw TooLargeError("classification is desk-scale: r <= 4 for N = 3, r <= 5 for N = 2");
    n_lo = std::max(n_lo, 1);
    n_hi = std::min(n_hi, N * r);

    std::vector<EquivClass> out;
    std::vector<std::vector<int>> blocks(r);
    std::vector<int> totals(static_cast<size_t>(N) * r, 0);

    auto at_leaf = [&](int used) {
        BlockStat m{used, r, N, blocks};
        if (block_graph(m).components.size() != 1) return;
        if (canonical_block_stat(m) != m) return;
        long long stab = block_stat_symmetries(m);
        long long size = factorial(used) * factorial(r) / stab;
        auto fiber = enumerate_fiber(suff_stat_of(m));
        FiberGraph fg = fiber_graph(fiber, 2);
        EquivClass c;
        c.rep = m;
        c.size = size;
        c.n_M = used;
        c.N_M = fg.component_count;
        c.fiber_size = static_cast<long long>(fiber.size());
        c.needs_degree3 = fg.component_count >= 2;
        c.indispensable = fiber.size() == 2 && fg.component_count == 2;
        out.push_back(std::move(c));
    };

    // Candidate canonical forms: nondecreasing block sequences whose symbols
    // first appear in increasing order; any orbit minimum has both properties.
    // "tight" tracks equality with the previous block; a fresh symbol (value
    // == used count) always breaks the tie upward since earlier blocks only
    // hold already-used symbols.
    auto place = [&](auto&& self, int j, int used) -> void {
        if (j == r) {
            if (used >= n_lo && used <= n_hi) at_leaf(used);
            return;
        }
        if (used + N * (r - j) < n_lo) return;
        auto& b = blocks[j];
        auto fill = [&](auto&& bself, int slot, int u, bool tight) -> void {
            if (slot == N) {
                self(self, j + 1, u);
                return;
            }
            int lo = slot > 0 ? b[slot - 1] : 0;
            if (tight) lo = std::max(lo, blocks[j - 1][slot]);
            int hi = std::min(u, n_hi - 1);  // value == u introduces a symbol
            for (int v = lo; v <= hi; ++v) {
                if (totals[v] == N) continue;
                ++totals[v];
                b.push_back(v);
                bself(bself, slot + 1, v == u ? u + 1 : u,
                      tight && v == blocks[j - 1][slot]);
                b.pop_back();
                --totals[v];
            }
        };
        fill(fill, 0, used, j > 0);
    };
    place(place, 0, 0);

    std::sort(out.begin(), out.end(), [](const EquivClass& a, const EquivClass& b) {
        if (a.n_M != b.n_M) return a.n_M < b.n_M;
        return a.rep.blocks < b.rep.blocks;
    });
    return out;
}

std::vector<ClassSizeRow> class_size_table(int r) {
    auto classes = classify_equiv(r, 3, 1, 3 * r);
    std::map<std::pair<int, int>, long long> agg;
    for (const auto& c : classes) agg[{c.n_M, c.N_M}] += c.size;
    std::vector<ClassSizeRow> rows;
    for (const auto& [key, size] : agg) rows.push_back({r, key.first, key.second, size});
    return rows;
}

}  // namespace birkhoff
