#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "birkhoff/fiber.hpp"
#include "birkhoff/model.hpp"
#include "doctest.h"

using namespace birkhoff;

namespace {

Vote pv(std::initializer_list<int> cands1) {
    std::vector<int> c;
    for (int k : cands1) c.push_back(k - 1);
    return Vote::of(c);
}

BlockStat blocks_of(int n, int N, std::vector<std::vector<int>> blocks) {
    for (auto& b : blocks) {
        for (int& k : b) --k;
        std::sort(b.begin(), b.end());
    }
    return BlockStat{n, static_cast<int>(blocks.size()), N, std::move(blocks)};
}

Vote random_vote(std::mt19937_64& rng, int n, int r) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(r);
    return Vote::of(all);
}

long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long v = 1;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

// Distinct sufficient statistics of all datasets with N votes over S_{n,r},
// by direct dataset enumeration.
std::vector<SuffStat> all_stats(int n, int r, int N) {
    auto votes = enumerate_votes(Config(n, r));
    std::set<SuffStat> seen;
    std::vector<int> pick(N, 0);
    auto rec = [&](auto&& self, int i, int lo) -> void {
        if (i == N) {
            Dataset d{Config(n, r), {}};
            for (int p : pick) d.votes.push_back(votes[p]);
            seen.insert(suff_stat(d));
            return;
        }
        for (int p = lo; p < static_cast<int>(votes.size()); ++p) {
            pick[i] = p;
            self(self, i + 1, p);
        }
    };
    rec(rec, 0, 0);
    return {seen.begin(), seen.end()};
}

}  // namespace

TEST_CASE("fiber elements round trip datasets and statistics") {
    Config cfg(4, 2);
    Dataset d{cfg, {pv({1, 2}), pv({1, 2}), pv({3, 4})}};
    FiberElement x = to_fiber_element(d);
    CHECK(x.size() == 2);
    CHECK(x.at(pv({1, 2})) == 2);
    CHECK(to_dataset(cfg, x) == d);
    CHECK(fiber_element_stat(4, 2, x) == suff_stat(d));

    Dataset improper{cfg, {Vote({Entry::improper(0, 1, 2), Entry::proper(3)})}};
    CHECK_THROWS_AS(to_fiber_element(improper), PreconditionError);
    FiberElement bad{{pv({1, 2}), 0}};
    CHECK_THROWS_AS(to_dataset(cfg, bad), PreconditionError);
}

TEST_CASE("move degree sums the positive part of the difference") {
    FiberElement x{{pv({1, 2}), 2}, {pv({2, 3}), 1}};
    FiberElement y{{pv({1, 2}), 1}, {pv({2, 3}), 2}};
    CHECK(move_degree_between(x, y) == 1);
    CHECK(move_degree_between(y, x) == 1);
    FiberElement z{{pv({3, 1}), 3}};
    CHECK(move_degree_between(x, z) == 3);
    CHECK(move_degree_between(x, x) == 0);
}

TEST_CASE("single vote fibers are singletons") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng() % 7);
        int r = 1 + static_cast<int>(rng() % std::min(n, 5));
        Dataset d{Config(n, r), {random_vote(rng, n, r)}};
        auto fiber = enumerate_fiber(suff_stat(d));
        REQUIRE(fiber.size() == 1);
        CHECK(fiber[0] == to_fiber_element(d));
    }
}

TEST_CASE("the six element three vote fiber") {
    BlockStat m = blocks_of(6, 3, {{1, 1, 2}, {3, 3, 4}, {4, 5, 6}});
    REQUIRE(block_stat_valid(m));
    BlockGraph g = block_graph(m);
    CHECK(g.edges == std::vector<std::pair<int, int>>{{1, 2}});
    CHECK(g.components == std::vector<std::vector<int>>{{0}, {1, 2}});
    CHECK(g.L == 2);

    SuffStat t = suff_stat_of(m);
    auto fiber = enumerate_fiber(t);
    CHECK(fiber.size() == 6);
    for (const auto& x : fiber) {
        int mass = 0;
        for (const auto& [v, c] : x) mass += c;
        CHECK(mass == 3);
        CHECK(fiber_element_stat(6, 3, x) == t);
    }
    CHECK(std::is_sorted(fiber.begin(), fiber.end()));
    CHECK(std::adjacent_find(fiber.begin(), fiber.end()) == fiber.end());
    CHECK(fiber_graph(fiber, 3).component_count == 1);
}

TEST_CASE("two vote fiber sizes follow the component law") {
    SUBCASE("worked shapes") {
        // Chain of overlapping blocks: one component, a single dataset.
        BlockStat chain = blocks_of(4, 2, {{1, 2}, {2, 3}, {3, 4}});
        CHECK(block_graph(chain).L == 1);
        CHECK(two_vote_fiber_size(chain) == 1);
        CHECK(enumerate_fiber(suff_stat_of(chain)).size() == 1);

        // Two disjoint non-constant blocks: the votes can pair up two ways.
        BlockStat split = blocks_of(4, 2, {{1, 2}, {3, 4}});
        CHECK(block_graph(split).L == 2);
        CHECK(two_vote_fiber_size(split) == 2);
        CHECK(enumerate_fiber(suff_stat_of(split)).size() == 2);

        // A constant block never distinguishes the votes.
        BlockStat pinned = blocks_of(3, 2, {{1, 1}, {2, 3}});
        CHECK(block_graph(pinned).L == 1);
        CHECK(two_vote_fiber_size(pinned) == 1);

        // All blocks constant: the two votes coincide.
        BlockStat constant = blocks_of(2, 2, {{1, 1}, {2, 2}});
        CHECK(block_graph(constant).L == 0);
        CHECK(two_vote_fiber_size(constant) == 1);
        CHECK(enumerate_fiber(suff_stat_of(constant)).size() == 1);

        BlockStat wide = blocks_of(8, 2, {{1, 2}, {3, 4}, {5, 6}, {7, 8}});
        CHECK(two_vote_fiber_size(wide) == 8);
        CHECK(enumerate_fiber(suff_stat_of(wide)).size() == 8);
    }
    SUBCASE("random statistics") {
        std::mt19937_64 rng(20240818);
        for (int trial = 0; trial < 200; ++trial) {
            int n = 2 + static_cast<int>(rng() % 7);
            int r = 1 + static_cast<int>(rng() % std::min(n, 5));
            Dataset d{Config(n, r), {random_vote(rng, n, r), random_vote(rng, n, r)}};
            SuffStat t = suff_stat(d);
            auto fiber = enumerate_fiber(t);
            CHECK(static_cast<long long>(fiber.size()) == two_vote_fiber_size(block_stat(t)));
            CHECK(std::find(fiber.begin(), fiber.end(), to_fiber_element(d)) != fiber.end());
        }
    }
}

TEST_CASE("fiber graphs split by move degree") {
    // The order-3 Latin square fiber: two elements, three votes apart.
    SuffStat latin{3, 3, 3, std::vector<int>(9, 1)};
    auto fiber = enumerate_fiber(latin);
    REQUIRE(fiber.size() == 2);
    CHECK(move_degree_between(fiber[0], fiber[1]) == 3);
    CHECK(fiber_graph(fiber, 2).component_count == 2);
    CHECK(fiber_graph(fiber, 3).component_count == 1);

    // Two elements two votes apart stay connected at either bound.
    BlockStat split = blocks_of(4, 2, {{1, 2}, {3, 4}});
    auto pair = enumerate_fiber(suff_stat_of(split));
    REQUIRE(pair.size() == 2);
    CHECK(move_degree_between(pair[0], pair[1]) == 2);
    CHECK(fiber_graph(pair, 2).component_count == 1);

    CHECK(fiber_graph({}, 2).component_count == 0);
    CHECK_THROWS_AS(fiber_graph(fiber, 0), PreconditionError);
}

TEST_CASE("unrealizable and malformed statistics") {
    // Row sums match N but one candidate is owed more slots than votes exist.
    SuffStat impossible{3, 2, 2, {2, 0, 0, 2, 0, 0}};
    CHECK(enumerate_fiber(impossible).empty());
    CHECK_FALSE(block_stat_valid(block_stat(impossible)));

    SuffStat negative{2, 1, 1, {2, -1}};
    CHECK_THROWS_AS(enumerate_fiber(negative), PreconditionError);
    SuffStat badrow{2, 1, 2, {1, 0}};
    CHECK_THROWS_AS(enumerate_fiber(badrow), PreconditionError);
    SuffStat huge{16, 16, 2, std::vector<int>(256, 2)};
    CHECK_THROWS_AS(enumerate_fiber(huge), TooLargeError);

    BlockStat three = blocks_of(3, 3, {{1, 2, 3}});
    CHECK_THROWS_AS(two_vote_fiber_size(three), PreconditionError);
    CHECK_THROWS_AS(classify_equiv(5, 3, 1, 15), TooLargeError);
    CHECK_THROWS_AS(classify_equiv(2, 4, 1, 8), PreconditionError);
}

TEST_CASE("canonical block statistics") {
    SUBCASE("greedy first occurrence is not minimal") {
        BlockStat m = blocks_of(4, 3, {{1, 2, 3}, {2, 3, 4}});
        BlockStat canon = canonical_block_stat(m);
        CHECK(canon.blocks == blocks_of(4, 3, {{1, 2, 3}, {1, 2, 4}}).blocks);
    }
    SUBCASE("idempotent and orbit invariant") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 60; ++trial) {
            int n = 3 + static_cast<int>(rng() % 4);
            int r = 1 + static_cast<int>(rng() % std::min(n, 4));
            Dataset d{Config(n, r),
                      {random_vote(rng, n, r), random_vote(rng, n, r), random_vote(rng, n, r)}};
            BlockStat m = block_stat(suff_stat(d));
            BlockStat canon = canonical_block_stat(m);
            CHECK(canonical_block_stat(canon) == canon);

            // Scramble candidates and positions; the canonical form must agree.
            std::vector<int> relabel(n);
            std::iota(relabel.begin(), relabel.end(), 0);
            std::shuffle(relabel.begin(), relabel.end(), rng);
            BlockStat scrambled = m;
            for (auto& b : scrambled.blocks) {
                for (int& k : b) k = relabel[k];
                std::sort(b.begin(), b.end());
            }
            std::shuffle(scrambled.blocks.begin(), scrambled.blocks.end(), rng);
            CHECK(canonical_block_stat(scrambled) == canon);
        }
    }
    SUBCASE("symmetry counts") {
        CHECK(block_stat_symmetries(blocks_of(3, 3, {{1, 2, 3}, {1, 2, 3}})) == 12);
        CHECK(block_stat_symmetries(blocks_of(2, 3, {{1, 1, 2}, {1, 2, 2}})) == 2);
        CHECK(block_stat_symmetries(blocks_of(1, 3, {{1, 1, 1}})) == 1);
        CHECK(block_stat_symmetries(blocks_of(4, 2, {{1, 2}, {3, 4}})) == 8);
    }
}

TEST_CASE("classification reproduces the published class sizes") {
    SUBCASE("single position") {
        auto rows = class_size_table(1);
        std::vector<ClassSizeRow> want{{1, 1, 1, 1}, {1, 2, 1, 2}, {1, 3, 1, 1}};
        CHECK(rows == want);
    }
    SUBCASE("two positions") {
        auto rows = class_size_table(2);
        std::vector<ClassSizeRow> want{
            {2, 2, 1, 2}, {2, 3, 1, 30}, {2, 3, 2, 1}, {2, 4, 1, 60}, {2, 5, 1, 30}};
        CHECK(rows == want);

        auto classes = classify_equiv(2, 3, 1, 6);
        const EquivClass* split = nullptr;
        for (const auto& c : classes)
            if (c.N_M == 2) {
                CHECK(split == nullptr);
                split = &c;
            }
        REQUIRE(split != nullptr);
        CHECK(split->rep.blocks == blocks_of(3, 3, {{1, 2, 3}, {1, 2, 3}}).blocks);
        CHECK(split->size == 1);
        CHECK(split->fiber_size == 2);
        CHECK(split->needs_degree3);
        CHECK(split->indispensable);
    }
    SUBCASE("three positions") {
        auto rows = class_size_table(3);
        std::vector<ClassSizeRow> want{{3, 3, 1, 30},   {3, 3, 2, 1},   {3, 4, 1, 1128},
                                       {3, 4, 2, 144},  {3, 5, 1, 5760}, {3, 5, 2, 150},
                                       {3, 6, 1, 8820}, {3, 7, 1, 4410}};
        CHECK(rows == want);
    }
    SUBCASE("four positions, four and five candidates") {
        std::map<std::pair<int, int>, long long> agg;
        for (const auto& c : classify_equiv(4, 3, 4, 5)) agg[{c.n_M, c.N_M}] += c.size;
        std::map<std::pair<int, int>, long long> want{{{4, 1}, 1128},  {{4, 2}, 144},
                                                      {{5, 1}, 82080}, {{5, 2}, 23040},
                                                      {{5, 4}, 600}};
        CHECK(agg == want);
    }
}

TEST_CASE("classes needing degree three match the published tabulation") {
    SUBCASE("three positions") {
        int need3 = 0, indis = 0;
        for (const auto& c : classify_equiv(3, 3, 1, 9))
            if (c.needs_degree3) {
                ++need3;
                if (c.indispensable) ++indis;
            }
        CHECK(need3 == 6);
        CHECK(indis == 5);
    }
    SUBCASE("four positions") {
        auto classes = classify_equiv(4, 3, 1, 12);
        CHECK(classes.size() == 241);

        // Key: sorted degree sequence of the block graph (identifies the
        // shape among connected graphs on four vertices), n_M, indispensable.
        std::map<std::tuple<std::vector<int>, int, bool>, int> rows;
        for (const auto& c : classes) {
            if (!c.needs_degree3) continue;
            auto g = block_graph(c.rep);
            std::vector<int> deg(4, 0);
            for (auto [a, b] : g.edges) {
                ++deg[a];
                ++deg[b];
            }
            std::sort(deg.begin(), deg.end());
            ++rows[{deg, c.n_M, c.indispensable}];
        }
        std::map<std::tuple<std::vector<int>, int, bool>, int> want{
            {{{2, 2, 2, 2}, 5, true}, 2},   // four-cycle
            {{{1, 2, 2, 3}, 5, true}, 2},   // triangle with a pendant edge
            {{{1, 2, 2, 3}, 5, false}, 2},  {{{1, 2, 2, 3}, 6, true}, 1},
            {{{1, 2, 2, 3}, 6, false}, 6},  {{{1, 2, 2, 3}, 7, false}, 2},
            {{{2, 2, 3, 3}, 5, true}, 7},   // diamond
            {{{2, 2, 3, 3}, 5, false}, 1},  {{{2, 2, 3, 3}, 6, false}, 5},
            {{{2, 2, 3, 3}, 7, false}, 1},
            {{{3, 3, 3, 3}, 4, true}, 1},   // complete graph
            {{{3, 3, 3, 3}, 5, true}, 2},   {{{3, 3, 3, 3}, 5, false}, 4},
            {{{3, 3, 3, 3}, 6, true}, 1},   {{{3, 3, 3, 3}, 6, false}, 1}};
        CHECK(rows == want);

        int total = 0;
        for (const auto& [k, v] : rows) total += v;
        CHECK(total == 38);
    }
}

TEST_CASE("class sizes count labeled statistics") {
    // Summing class sizes with candidate-choice multiplicity must reproduce a
    // direct count of distinct connected statistics over [n].
    for (auto [n, r] : std::vector<std::pair<int, int>>{{4, 2}, {5, 2}, {4, 3}}) {
        auto stats = all_stats(n, r, 3);
        long long connected = 0;
        for (const auto& t : stats)
            if (block_graph(block_stat(t)).components.size() == 1) ++connected;

        long long predicted = 0;
        for (const auto& c : classify_equiv(r, 3, 1, 3 * r))
            predicted += binom(n, c.n_M) * c.size;
        CHECK(connected == predicted);
    }
}

TEST_CASE("two vote classification agrees with the law") {
    auto classes = classify_equiv(2, 2, 1, 4);
    for (const auto& c : classes) {
        CHECK(c.fiber_size == two_vote_fiber_size(c.rep));
        CHECK(c.N_M == 1);  // connected block graphs give singleton fibers here
    }
    auto stats = all_stats(4, 2, 2);
    long long connected = 0;
    for (const auto& t : stats)
        if (block_graph(block_stat(t)).components.size() == 1) ++connected;
    long long predicted = 0;
    for (const auto& c : classes) predicted += binom(4, c.n_M) * c.size;
    CHECK(connected == predicted);
}
