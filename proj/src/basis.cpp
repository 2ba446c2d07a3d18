#include "birkhoff/basis.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "birkhoff/errors.hpp"
#include "birkhoff/io.hpp"
#include "birkhoff/model.hpp"

namespace birkhoff {

namespace {

// n!/(n-r)! capped so scale guards never overflow.
long long vote_count_capped(int n, int r, long long cap) {
    long long v = 1;
    for (int i = 0; i < r; ++i) {
        v *= n - i;
        if (v > cap) return cap + 1;
    }
    return v;
}

void check_shape(int n, int r) {
    if (n < 1 || r < 1 || r > n) throw PreconditionError("need 1 <= r <= n");
}

// Distinct sufficient statistics of all N-vote proper datasets over S_{n,r}.
std::vector<SuffStat> distinct_stats(int n, int r, int N, long long max_votes) {
    if (vote_count_capped(n, r, max_votes) > max_votes)
        throw TooLargeError("too many votes to enumerate " + std::to_string(N) +
                            "-vote statistics at n=" + std::to_string(n) +
                            ", r=" + std::to_string(r));
    auto votes = enumerate_votes(Config(n, r));
    std::set<SuffStat> seen;
    Dataset d{Config(n, r), std::vector<Vote>(N)};
    auto rec = [&](auto&& self, int i, int lo) -> void {
        if (i == N) {
            seen.insert(suff_stat(d));
            return;
        }
        for (int p = lo; p < static_cast<int>(votes.size()); ++p) {
            d.votes[i] = votes[p];
            self(self, i + 1, p);
        }
    };
    rec(rec, 0, 0);
    return {seen.begin(), seen.end()};
}

Move difference(const FiberElement& a, const FiberElement& b) {
    Move m;
    for (const auto& [v, c] : a) m.z[v] += c;
    for (const auto& [v, c] : b) m.z[v] -= c;
    std::erase_if(m.z, [](const auto& kv) { return kv.second == 0; });
    return m;
}

long long binomial(int n, int m) {
    if (m < 0 || m > n) return 0;
    __int128 v = 1;
    for (int i = 1; i <= m; ++i) {
        v = v * (n - m + i) / i;
        if (v > __int128(1) << 62) throw OverflowError("binomial overflow");
    }
    return static_cast<long long>(v);
}

}  // namespace

int Move::degree() const {
    int d = 0;
    for (const auto& [v, c] : z)
        if (c > 0) d += c;
    return d;
}

Move negate_move(Move m) {
    for (auto& [v, c] : m.z) c = -c;
    return m;
}

Move canonical_move(Move m) {
    if (!m.z.empty() && m.z.begin()->second < 0) return negate_move(std::move(m));
    return m;
}

bool is_kernel_move(int n, int r, const Move& m) {
    std::vector<long long> acc(static_cast<size_t>(r) * n, 0);
    for (const auto& [v, c] : m.z) {
        if (v.size() != r || !v.is_proper()) return false;
        for (int j = 0; j < r; ++j) {
            int k = v.at(j).plus();
            if (k < 0 || k >= n) return false;
            acc[static_cast<size_t>(j) * n + k] += c;
        }
    }
    return std::all_of(acc.begin(), acc.end(), [](long long x) { return x == 0; });
}

std::optional<FiberElement> apply_move(const FiberElement& x, const Move& m) {
    FiberElement out = x;
    for (const auto& [v, c] : m.z) out[v] += c;
    for (const auto& [v, c] : out)
        if (c < 0) return std::nullopt;
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

FiberElement move_part(const Move& m, int sign) {
    FiberElement out;
    for (const auto& [v, c] : m.z) {
        if (sign > 0 && c > 0) out[v] = c;
        if (sign < 0 && c < 0) out[v] = -c;
    }
    return out;
}

long long CountPolynomial::evaluate(int n) const {
    __int128 total = 0;
    for (const auto& [m, c] : terms) {
        total += __int128(c) * binomial(n, m);
        if (total > __int128(1) << 62) throw OverflowError("count overflow");
    }
    return static_cast<long long>(total);
}

long long minimal_basis_counts(int n, int r, int degree) {
    if (n < 1 || r < 1) throw PreconditionError("need positive n and r");
    if (r > n) return 0;  // no votes, so no moves; keeps the count total on the table grid
    if (degree == 2) {
        long long total = 0;
        for (const auto& t : distinct_stats(n, r, 2, 4000))
            total += static_cast<long long>(enumerate_fiber(t).size()) - 1;
        return total;
    }
    if (degree == 3) {
        long long total = 0;
        for (const auto& t : distinct_stats(n, r, 3, 200)) {
            auto fiber = enumerate_fiber(t);
            total += fiber_graph(fiber, 2).component_count - 1;
        }
        return total;
    }
    throw PreconditionError("basis counting supports degrees 2 and 3");
}

CountPolynomial count_formula(int r, int degree) {
    if (degree != 2 && degree != 3)
        throw PreconditionError("count formulas cover degrees 2 and 3");
    switch (r) {
        case 2:
            return degree == 2 ? CountPolynomial{{{4, 6}}} : CountPolynomial{{{3, 1}}};
        case 3:
            return degree == 2 ? CountPolynomial{{{4, 18}, {5, 270}, {6, 270}}}
                               : CountPolynomial{{{3, 1}, {4, 156}, {5, 210}, {6, 60}}};
        case 4:
            return degree == 2
                       ? CountPolynomial{{{4, 18}, {5, 960}, {6, 10620}, {7, 30240}, {8, 17640}}}
                       : CountPolynomial{{{4, 160},
                                          {5, 28040},
                                          {6, 86660},
                                          {7, 102480},
                                          {8, 57120},
                                          {9, 10080}}};
        case 5:
            return degree == 2 ? CountPolynomial{{{5, 1050},
                                                  {6, 40050},
                                                  {7, 485100},
                                                  {8, 2444400},
                                                  {9, 3969000},
                                                  {10, 1701000}}}
                               : CountPolynomial{{{5, 28840},
                                                  {6, 6883200},
                                                  {7, 36009400},
                                                  {8, 83316800},
                                                  {9, 107898000},
                                                  {10, 76104000},
                                                  {11, 27720000},
                                                  {12, 3696000}}};
        default:
            throw UnsupportedError("no closed-form counts for r=" + std::to_string(r));
    }
}

std::vector<Move> enumerate_basis_moves(int n, int r, int max_degree) {
    check_shape(n, r);
    if (max_degree != 2 && max_degree != 3)
        throw PreconditionError("basis enumeration supports max degree 2 or 3");
    std::vector<Move> out;

    // One spanning star per two-vote fiber; elements differ by degree 2.
    for (const auto& t : distinct_stats(n, r, 2, 4000)) {
        auto fiber = enumerate_fiber(t);
        for (size_t i = 1; i < fiber.size(); ++i)
            out.push_back(canonical_move(difference(fiber[i], fiber[0])));
    }

    // One connector per extra degree-2 component of each three-vote fiber;
    // representatives in distinct components differ by degree exactly 3.
    if (max_degree >= 3) {
        for (const auto& t : distinct_stats(n, r, 3, 200)) {
            auto fiber = enumerate_fiber(t);
            auto graph = fiber_graph(fiber, 2);
            const auto& comps = graph.components;
            for (size_t i = 1; i < comps.size(); ++i)
                out.push_back(canonical_move(
                    difference(fiber[comps[i].front()], fiber[comps[0].front()])));
        }
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<Move> random_move(std::mt19937_64& rng, const Config& cfg, int degree) {
    if (degree != 2 && degree != 3) throw PreconditionError("move degree must be 2 or 3");
    const int n = cfg.n(), r = cfg.r();

    // degree i.i.d. uniform proper votes (partial Fisher-Yates each).
    std::vector<std::vector<int>> v(degree);
    std::vector<int> pool(n);
    for (auto& vote : v) {
        std::iota(pool.begin(), pool.end(), 0);
        for (int j = 0; j < r; ++j) {
            std::uniform_int_distribution<int> pick(j, n - 1);
            std::swap(pool[j], pool[pick(rng)]);
        }
        vote.assign(pool.begin(), pool.begin() + r);
    }

    // Independent uniform shuffle of the candidates within each position.
    std::vector<std::vector<int>> w(degree, std::vector<int>(r));
    std::vector<int> slot(degree);
    for (int j = 0; j < r; ++j) {
        std::iota(slot.begin(), slot.end(), 0);
        std::shuffle(slot.begin(), slot.end(), rng);
        for (int i = 0; i < degree; ++i) w[i][j] = v[slot[i]][j];
    }

    for (const auto& vote : w) {
        std::set<int> distinct(vote.begin(), vote.end());
        if (static_cast<int>(distinct.size()) != r) return std::nullopt;  // collision
    }

    Move m;
    for (const auto& vote : w) ++m.z[Vote::of(vote)];
    for (const auto& vote : v) --m.z[Vote::of(vote)];
    std::erase_if(m.z, [](const auto& kv) { return kv.second == 0; });
    if (m.z.empty()) return std::nullopt;  // nothing changed
    return m;
}

std::string format_move(const Move& m) {
    std::string out;
    for (int sign : {+1, -1})
        for (const auto& [v, c] : m.z) {
            if ((sign > 0) != (c > 0)) continue;
            for (int i = 0; i < std::abs(c); ++i) {
                if (!out.empty()) out += ' ';
                out += sign > 0 ? '+' : '-';
                out += vote_tuple(v);
            }
        }
    return out;
}

Move parse_move(const std::string& line, int n) {
    Move m;
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
        if (token.size() < 2 || (token[0] != '+' && token[0] != '-'))
            throw ParseError("move entries start with '+' or '-', got '" + token + "'");
        Vote v = parse_vote_tuple(token.substr(1), n);
        std::set<int> distinct;
        for (const auto& e : v.entries()) distinct.insert(e.plus());
        if (static_cast<int>(distinct.size()) != v.size())
            throw ParseError("repeated candidate in move vote '" + token + "'");
        m.z[v] += token[0] == '+' ? 1 : -1;
    }
    std::erase_if(m.z, [](const auto& kv) { return kv.second == 0; });
    return m;
}

std::string format_basis(const std::vector<Move>& basis) {
    std::string out;
    for (const auto& m : basis) {
        out += format_move(m);
        out += '\n';
    }
    return out;
}

std::vector<Move> parse_basis(const std::string& text, int n) {
    std::vector<Move> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_move(line, n));
    }
    return out;
}

}  // namespace birkhoff
