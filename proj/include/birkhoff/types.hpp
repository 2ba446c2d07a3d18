#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "birkhoff/errors.hpp"

namespace birkhoff {

// Model size: votes rank r candidates out of n, 1 <= r <= n.
class Config {
  public:
    Config(int n, int r) : n_(n), r_(r) {
        if (r < 1 || n < r) throw CompatibilityError("config requires 1 <= r <= n");
    }
    int n() const { return n_; }
    int r() const { return r_; }
    // Number of proper votes, n! / (n-r)!.
    long long num_votes() const {
        long long v = 1;
        for (int i = 0; i < r_; ++i) v *= n_ - i;
        return v;
    }
    friend auto operator<=>(const Config&, const Config&) = default;

  private:
    int n_;
    int r_;
};

// One position of a vote: either a single candidate (proper) or a formal
// combination p1 + p2 - m of three distinct candidates (improper element).
// Candidates are 0-based internally; all I/O uses 1-based labels.
class Entry {
  public:
    static Entry proper(int k) {
        if (k < 0) throw PreconditionError("entry candidate must be nonnegative");
        return Entry(k, -1, -1);
    }
    static Entry improper(int p1, int p2, int m) {
        if (p1 > p2) std::swap(p1, p2);
        if (p1 < 0 || m < 0 || p1 == p2 || m == p1 || m == p2)
            throw PreconditionError("improper element needs three distinct candidates");
        return Entry(p1, p2, m);
    }
    bool is_improper() const { return p2_ >= 0; }
    // Proper entry's candidate.
    int plus() const { return p1_; }
    // Improper element's two added candidates (plus1 < plus2) and subtracted one.
    int plus1() const { return p1_; }
    int plus2() const { return p2_; }
    int minus() const { return m_; }
    friend auto operator<=>(const Entry&, const Entry&) = default;

  private:
    Entry(int p1, int p2, int m) : p1_(p1), p2_(p2), m_(m) {}
    int p1_;
    int p2_ = -1;
    int m_ = -1;
};

// A vote: one entry per position 0..r-1.
class Vote {
  public:
    Vote() = default;
    explicit Vote(std::vector<Entry> entries) : entries_(std::move(entries)) {}
    // Proper vote from a candidate sequence.
    static Vote of(const std::vector<int>& cands) {
        std::vector<Entry> es;
        es.reserve(cands.size());
        for (int k : cands) es.push_back(Entry::proper(k));
        return Vote(std::move(es));
    }
    int size() const { return static_cast<int>(entries_.size()); }
    const Entry& at(int j) const { return entries_[j]; }
    Entry& at(int j) { return entries_[j]; }
    const std::vector<Entry>& entries() const { return entries_; }
    bool is_proper() const {
        for (const auto& e : entries_)
            if (e.is_improper()) return false;
        return true;
    }
    friend auto operator<=>(const Vote&, const Vote&) = default;

  private:
    std::vector<Entry> entries_;
};

enum class VoteKind { Proper, Improper, Collision, ImproperWithCollision, Invalid };

// Dense r x n row-major {-1,0,1} table of a vote; rows are positions.
using VoteMatrix = std::vector<int>;

VoteMatrix to_matrix(const Vote& v, int n);
// Inverse of to_matrix; requires a non-Invalid matrix shape (each row a single
// +1 or a +1+1-1 triple, at most one improper row).
Vote from_matrix(const VoteMatrix& m, int r, int n);

VoteKind classify_matrix(const VoteMatrix& m, int r, int n);
VoteKind classify_vote(const Vote& v, int n);

const char* vote_kind_name(VoteKind k);

struct Dataset {
    Config config;
    std::vector<Vote> votes;

    int size() const { return static_cast<int>(votes.size()); }
    friend auto operator<=>(const Dataset&, const Dataset&) = default;
};

enum class DatasetKind { Proper, Improper, Other };

// Proper: every vote proper. Improper: exactly one improper vote, the rest
// proper. Anything else (collisions, several improper votes): Other.
DatasetKind dataset_kind(const Dataset& d);

// Position-by-candidate contingency table t, t[j*n+k] = signed count of
// candidate k at position j over all votes.
struct SuffStat {
    int n = 0;
    int r = 0;
    int N = 0;
    std::vector<int> t;

    int at(int j, int k) const { return t[static_cast<size_t>(j) * n + k]; }
    friend auto operator<=>(const SuffStat&, const SuffStat&) = default;
};

SuffStat suff_stat(const Dataset& d);

}  // namespace birkhoff
