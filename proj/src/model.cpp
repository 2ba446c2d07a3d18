#include "birkhoff/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace birkhoff {

VoteMatrix to_matrix(const Vote& v, int n) {
    VoteMatrix m(static_cast<size_t>(v.size()) * n, 0);
    for (int j = 0; j < v.size(); ++j) {
        const Entry& e = v.at(j);
        int hi = e.is_improper() ? std::max(e.plus2(), e.minus()) : e.plus();
        if (hi >= n) throw PreconditionError("candidate outside 0..n-1");
        if (e.is_improper()) {
            m[static_cast<size_t>(j) * n + e.plus1()] += 1;
            m[static_cast<size_t>(j) * n + e.plus2()] += 1;
            m[static_cast<size_t>(j) * n + e.minus()] -= 1;
        } else {
            m[static_cast<size_t>(j) * n + e.plus()] += 1;
        }
    }
    return m;
}

Vote from_matrix(const VoteMatrix& m, int r, int n) {
    std::vector<Entry> es;
    es.reserve(r);
    for (int j = 0; j < r; ++j) {
        std::vector<int> plus, minus;
        for (int k = 0; k < n; ++k) {
            int c = m[static_cast<size_t>(j) * n + k];
            if (c == 1) plus.push_back(k);
            else if (c == -1) minus.push_back(k);
            else if (c != 0)
                throw PreconditionError("matrix cell outside {-1,0,1}");
        }
        if (plus.size() == 1 && minus.empty())
            es.push_back(Entry::proper(plus[0]));
        else if (plus.size() == 2 && minus.size() == 1)
            es.push_back(Entry::improper(plus[0], plus[1], minus[0]));
        else
            throw PreconditionError("matrix row is not a vote entry");
    }
    return Vote(std::move(es));
}

VoteKind classify_matrix(const VoteMatrix& m, int r, int n) {
    int minus_col = -1;
    int minus_count = 0;
    for (int j = 0; j < r; ++j) {
        int row_sum = 0;
        for (int k = 0; k < n; ++k) {
            int c = m[static_cast<size_t>(j) * n + k];
            if (c < -1 || c > 1) return VoteKind::Invalid;
            row_sum += c;
            if (c == -1) {
                ++minus_count;
                minus_col = k;
            }
        }
        if (row_sum != 1) return VoteKind::Invalid;
    }
    if (minus_count > 1) return VoteKind::Invalid;

    int collisions = 0;
    for (int k = 0; k < n; ++k) {
        int pos = 0;
        for (int j = 0; j < r; ++j)
            if (m[static_cast<size_t>(j) * n + k] == 1) ++pos;
        // Signed column sum must stay below 2; exactly 2 marks the collision.
        int limit = (k == minus_col) ? 3 : 2;
        if (pos > limit) return VoteKind::Invalid;
        if (pos == limit) ++collisions;
    }
    if (collisions > 1) return VoteKind::Invalid;

    if (minus_count == 0)
        return collisions == 0 ? VoteKind::Proper : VoteKind::Collision;
    return collisions == 0 ? VoteKind::Improper : VoteKind::ImproperWithCollision;
}

VoteKind classify_vote(const Vote& v, int n) {
    return classify_matrix(to_matrix(v, n), v.size(), n);
}

const char* vote_kind_name(VoteKind k) {
    switch (k) {
        case VoteKind::Proper: return "proper";
        case VoteKind::Improper: return "improper";
        case VoteKind::Collision: return "collision";
        case VoteKind::ImproperWithCollision: return "improper_with_collision";
        case VoteKind::Invalid: return "invalid";
    }
    return "invalid";
}

DatasetKind dataset_kind(const Dataset& d) {
    int improper = 0;
    for (const auto& v : d.votes) {
        switch (classify_vote(v, d.config.n())) {
            case VoteKind::Proper: break;
            case VoteKind::Improper:
                ++improper;
                break;
            default: return DatasetKind::Other;
        }
        if (improper > 1) return DatasetKind::Other;
    }
    return improper == 0 ? DatasetKind::Proper : DatasetKind::Improper;
}

SuffStat suff_stat(const Dataset& d) {
    SuffStat s;
    s.n = d.config.n();
    s.r = d.config.r();
    s.N = d.size();
    s.t.assign(static_cast<size_t>(s.r) * s.n, 0);
    for (const auto& v : d.votes) {
        if (v.size() != s.r) throw CompatibilityError("vote length differs from config");
        VoteMatrix m = to_matrix(v, s.n);
        for (size_t i = 0; i < m.size(); ++i) s.t[i] += m[i];
    }
    return s;
}

namespace {

constexpr long long kEnumerationLimit = 10'000'000;

void enumerate_rec(const Config& cfg, std::vector<int>& prefix, std::vector<bool>& used,
                   std::vector<Vote>& out) {
    if (static_cast<int>(prefix.size()) == cfg.r()) {
        out.push_back(Vote::of(prefix));
        return;
    }
    for (int k = 0; k < cfg.n(); ++k) {
        if (used[k]) continue;
        used[k] = true;
        prefix.push_back(k);
        enumerate_rec(cfg, prefix, used, out);
        prefix.pop_back();
        used[k] = false;
    }
}

}  // namespace

std::vector<Vote> enumerate_votes(const Config& cfg) {
    if (cfg.num_votes() > kEnumerationLimit)
        throw TooLargeError("vote enumeration exceeds " + std::to_string(kEnumerationLimit));
    std::vector<Vote> out;
    out.reserve(static_cast<size_t>(cfg.num_votes()));
    std::vector<int> prefix;
    std::vector<bool> used(cfg.n(), false);
    enumerate_rec(cfg, prefix, used, out);
    return out;
}

long long vote_index(const Config& cfg, const Vote& v) {
    if (v.size() != cfg.r()) throw CompatibilityError("vote length differs from config");
    std::vector<bool> used(cfg.n(), false);
    long long idx = 0;
    for (int j = 0; j < cfg.r(); ++j) {
        const Entry& e = v.at(j);
        if (e.is_improper()) throw PreconditionError("vote_index needs a proper vote");
        int k = e.plus();
        if (k < 0 || k >= cfg.n() || used[k])
            throw PreconditionError("vote is not an injection into the candidate set");
        int smaller = 0;
        for (int k2 = 0; k2 < k; ++k2)
            if (!used[k2]) ++smaller;
        long long suffix = 1;
        for (int i = j + 1; i < cfg.r(); ++i) suffix *= cfg.n() - i;
        idx += smaller * suffix;
        used[k] = true;
    }
    return idx;
}

IntMatrix config_matrix(const Config& cfg) {
    std::vector<Vote> votes = enumerate_votes(cfg);
    IntMatrix m;
    m.rows = cfg.r() * cfg.n();
    m.cols = static_cast<int>(votes.size());
    m.a.assign(static_cast<size_t>(m.rows) * m.cols, 0);
    for (int c = 0; c < m.cols; ++c)
        for (int j = 0; j < cfg.r(); ++j) m.at(j * cfg.n() + votes[c].at(j).plus(), c) = 1;
    return m;
}

int matrix_rank(IntMatrix m) {
    int rank = 0;
    int row = 0;
    long long prev = 1;
    for (int col = 0; col < m.cols && row < m.rows; ++col) {
        int piv = -1;
        for (int i = row; i < m.rows; ++i)
            if (m.at(i, col) != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        if (piv != row)
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(row, j));
        for (int i = row + 1; i < m.rows; ++i) {
            for (int j = col + 1; j < m.cols; ++j)
                m.at(i, j) = (m.at(row, col) * m.at(i, j) - m.at(i, col) * m.at(row, j)) / prev;
            m.at(i, col) = 0;
        }
        prev = m.at(row, col);
        ++row;
        ++rank;
    }
    return rank;
}

IntMatrix vstack(const IntMatrix& top, const IntMatrix& bottom) {
    if (top.cols != bottom.cols) throw CompatibilityError("vstack needs equal column counts");
    IntMatrix m;
    m.rows = top.rows + bottom.rows;
    m.cols = top.cols;
    m.a = top.a;
    m.a.insert(m.a.end(), bottom.a.begin(), bottom.a.end());
    return m;
}

namespace {

void check_weights(const Config& cfg, const Weights& psi) {
    if (static_cast<int>(psi.size()) != cfg.r() * cfg.n())
        throw CompatibilityError("weights must be an r x n table");
    for (double w : psi)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw PreconditionError("weights must be finite and nonnegative");
}

}  // namespace

double compute_Z(const Config& cfg, const Weights& psi) {
    check_weights(cfg, psi);
    int n = cfg.n(), r = cfg.r();
    if (n > 24) throw OverflowError("compute_Z supports n <= 24");
    // f[S] = total weight of injections of positions 0..|S|-1 with image S.
    std::vector<double> f(size_t{1} << n, 0.0);
    f[0] = 1.0;
    double z = 0.0;
    for (uint32_t s = 1; s < (uint32_t{1} << n); ++s) {
        int sz = std::popcount(s);
        if (sz > r) continue;
        double acc = 0.0;
        for (uint32_t rest = s; rest != 0;) {
            uint32_t bit = rest & (~rest + 1);
            int k = std::countr_zero(bit);
            acc += f[s ^ bit] * psi[static_cast<size_t>(sz - 1) * n + k];
            rest ^= bit;
        }
        f[s] = acc;
        if (sz == r) z += acc;
    }
    return z;
}

double vote_probability(const Config& cfg, const Weights& psi, const Vote& v) {
    check_weights(cfg, psi);
    if (v.size() != cfg.r()) throw CompatibilityError("vote length differs from config");
    double w = 1.0;
    for (int j = 0; j < cfg.r(); ++j) {
        const Entry& e = v.at(j);
        if (e.is_improper()) throw PreconditionError("vote_probability needs a proper vote");
        w *= psi[static_cast<size_t>(j) * cfg.n() + e.plus()];
    }
    double z = compute_Z(cfg, psi);
    if (z <= 0.0) throw PreconditionError("normalizing constant vanished");
    return w / z;
}

std::vector<double> position_marginals(const Config& cfg, const Weights& psi) {
    check_weights(cfg, psi);
    std::vector<Vote> votes = enumerate_votes(cfg);
    std::vector<double> marg(static_cast<size_t>(cfg.r()) * cfg.n(), 0.0);
    double z = 0.0;
    for (const auto& v : votes) {
        double w = 1.0;
        for (int j = 0; j < cfg.r(); ++j) w *= psi[static_cast<size_t>(j) * cfg.n() + v.at(j).plus()];
        z += w;
        for (int j = 0; j < cfg.r(); ++j) marg[static_cast<size_t>(j) * cfg.n() + v.at(j).plus()] += w;
    }
    if (z <= 0.0) throw PreconditionError("normalizing constant vanished");
    for (double& x : marg) x /= z;
    return marg;
}

}  // namespace birkhoff
