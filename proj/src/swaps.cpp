#include "birkhoff/swaps.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>
#include <string>

namespace birkhoff {

std::optional<ImproperInfo> improper_info(const Vote& v) {
    for (int j = 0; j < v.size(); ++j) {
        const Entry& e = v.at(j);
        if (e.is_improper()) return ImproperInfo{j, e.plus1(), e.plus2(), e.minus()};
    }
    return std::nullopt;
}

int improper_vote_index(const Dataset& d) {
    for (int i = 0; i < d.size(); ++i)
        if (!d.votes[i].is_proper()) return i;
    return -1;
}

namespace {

using Cell = std::array<int, 3>;  // vote, position, candidate

struct Mats {
    int r = 0;
    int n = 0;
    std::vector<VoteMatrix> m;

    int cell(int v, int p, int k) const { return m[v][static_cast<size_t>(p) * n + k]; }
    int& cell(int v, int p, int k) { return m[v][static_cast<size_t>(p) * n + k]; }
};

Mats to_mats(const Dataset& d) {
    Mats mats;
    mats.r = d.config.r();
    mats.n = d.config.n();
    for (const auto& v : d.votes) {
        if (v.size() != mats.r) throw CompatibilityError("vote length differs from config");
        mats.m.push_back(to_matrix(v, mats.n));
    }
    return mats;
}

Dataset to_dataset(const Mats& mats, const Config& cfg) {
    Dataset d{cfg, {}};
    d.votes.reserve(mats.m.size());
    for (const auto& m : mats.m) d.votes.push_back(from_matrix(m, mats.r, mats.n));
    return d;
}

void check_indices(const Dataset& d, const SwapSpec& s) {
    if (s.vote1 < 0 || s.vote1 >= d.size() || s.vote2 < 0 || s.vote2 >= d.size() ||
        s.vote1 == s.vote2)
        throw PreconditionError("swap needs two distinct votes of the dataset");
    if (s.position < 0 || s.position >= d.config.r())
        throw PreconditionError("swap position out of range");
    if (s.cand1 < 0 || s.cand1 >= d.config.n() || s.cand2 < 0 || s.cand2 >= d.config.n() ||
        s.cand1 == s.cand2)
        throw PreconditionError("swap needs two distinct candidates");
}

void apply_to_rows(VoteMatrix& m1, VoteMatrix& m2, int n, int p, int k1, int k2) {
    m1[static_cast<size_t>(p) * n + k1] -= 1;
    m1[static_cast<size_t>(p) * n + k2] += 1;
    m2[static_cast<size_t>(p) * n + k2] -= 1;
    m2[static_cast<size_t>(p) * n + k1] += 1;
}

// The colliding candidate of a vote, or -1: the candidate whose positive count
// reaches two (three when it is also the subtracted one).
int collision_candidate(const VoteMatrix& m, int r, int n) {
    int minus_col = -1;
    for (int i = 0; i < r * n; ++i)
        if (m[i] == -1) minus_col = i % n;
    for (int k = 0; k < n; ++k) {
        int pos = 0;
        for (int j = 0; j < r; ++j)
            if (m[static_cast<size_t>(j) * n + k] == 1) ++pos;
        if (pos == (k == minus_col ? 3 : 2)) return k;
    }
    return -1;
}

int count_improper_rows(const VoteMatrix& m, int r, int n) {
    int c = 0;
    for (int j = 0; j < r; ++j)
        for (int k = 0; k < n; ++k)
            if (m[static_cast<size_t>(j) * n + k] == -1) ++c;
    return c;
}

struct Engine {
    Mats mats;
    std::vector<int> active;
    std::set<Cell> protect;
    std::set<Cell> arrivals;
    std::vector<SwapSpec> steps;
    int max_steps = 0;
    long long budget = 20000;
    std::mt19937_64* rng = nullptr;
    std::function<bool(const Mats&)> accept;

    bool defective(int v) const {
        VoteKind k = classify_matrix(mats.m[v], mats.r, mats.n);
        return k == VoteKind::Collision || k == VoteKind::ImproperWithCollision;
    }

    int defect_count() const {
        int c = 0;
        for (int v : active)
            if (defective(v)) ++c;
        return c;
    }

    bool run() {
        if (--budget < 0) throw NonterminationError("swap chain search budget exhausted");
        std::vector<std::pair<int, int>> defects;  // vote, colliding candidate
        for (int v : active)
            if (int x = collision_candidate(mats.m[v], mats.r, mats.n); x >= 0)
                if (defective(v)) defects.push_back({v, x});
        if (defects.empty()) return accept(mats);
        if (static_cast<int>(steps.size()) >= max_steps) return false;

        struct Option {
            SwapSpec s;
            int from_arrival;  // 0 when the lost copy predates the chain
            int defects_after;
        };
        std::vector<Option> opts;
        for (auto [v, x] : defects) {
            for (int p = 0; p < mats.r; ++p) {
                if (mats.cell(v, p, x) != 1 || protect.count({v, p, x})) continue;
                int arr = arrivals.count({v, p, x}) ? 1 : 0;
                for (int u : active) {
                    if (u == v) continue;
                    for (int y = 0; y < mats.n; ++y) {
                        if (y == x || mats.cell(u, p, y) != 1 || protect.count({u, p, y}))
                            continue;
                        VoteMatrix mv = mats.m[v], mu = mats.m[u];
                        apply_to_rows(mv, mu, mats.n, p, x, y);
                        if (classify_matrix(mv, mats.r, mats.n) == VoteKind::Invalid ||
                            classify_matrix(mu, mats.r, mats.n) == VoteKind::Invalid)
                            continue;
                        int after = 0;
                        for (int w : active) {
                            const VoteMatrix& wm = w == v ? mv : (w == u ? mu : mats.m[w]);
                            VoteKind k = classify_matrix(wm, mats.r, mats.n);
                            if (k == VoteKind::Collision || k == VoteKind::ImproperWithCollision)
                                ++after;
                        }
                        opts.push_back({SwapSpec{v, u, p, x, y}, arr, after});
                    }
                }
            }
        }
        std::stable_sort(opts.begin(), opts.end(), [](const Option& a, const Option& b) {
            if (a.from_arrival != b.from_arrival) return a.from_arrival < b.from_arrival;
            if (a.defects_after != b.defects_after) return a.defects_after < b.defects_after;
            return a.s < b.s;
        });
        if (rng) {
            // Random tie-break inside equally preferred groups.
            size_t lo = 0;
            while (lo < opts.size()) {
                size_t hi = lo + 1;
                while (hi < opts.size() && opts[hi].from_arrival == opts[lo].from_arrival &&
                       opts[hi].defects_after == opts[lo].defects_after)
                    ++hi;
                std::shuffle(opts.begin() + lo, opts.begin() + hi, *rng);
                lo = hi;
            }
        }

        for (const Option& o : opts) {
            Mats saved_m = mats;
            std::set<Cell> saved_a = arrivals;
            const SwapSpec& s = o.s;
            apply_to_rows(mats.m[s.vote1], mats.m[s.vote2], mats.n, s.position, s.cand1, s.cand2);
            arrivals.erase({s.vote1, s.position, s.cand1});
            arrivals.erase({s.vote2, s.position, s.cand2});
            arrivals.insert({s.vote1, s.position, s.cand2});
            arrivals.insert({s.vote2, s.position, s.cand1});
            steps.push_back(s);
            if (run()) return true;
            steps.pop_back();
            mats = std::move(saved_m);
            arrivals = std::move(saved_a);
        }
        return false;
    }
};

ChainResult finish(const Dataset& d, Engine& eng, const char* what) {
    ChainResult res{d, {}};
    res.trace.start_kind = dataset_kind(d);
    if (!eng.run())
        throw NonterminationError(std::string(what) + ": no admissible swap chain found");
    res.dataset = to_dataset(eng.mats, d.config);
    res.trace.steps = std::move(eng.steps);
    res.trace.end_kind = dataset_kind(res.dataset);
    return res;
}

// Shared guard: chains never touch votes outside {i1, i2}, so every other vote
// must already be settled, and at most one improper vote may exist overall.
void check_chain_context(const Dataset& d, int i1, int i2) {
    if (i1 < 0 || i1 >= d.size() || i2 < 0 || i2 >= d.size() || i1 == i2)
        throw PreconditionError("chain needs two distinct votes of the dataset");
    int improper = 0;
    for (int v = 0; v < d.size(); ++v) {
        VoteKind k = classify_vote(d.votes[v], d.config.n());
        if (k == VoteKind::Invalid) throw PreconditionError("dataset holds an invalid vote");
        if (k == VoteKind::Improper || k == VoteKind::ImproperWithCollision) ++improper;
        if (v != i1 && v != i2 && (k == VoteKind::Collision || k == VoteKind::ImproperWithCollision))
            throw PreconditionError("collision outside the chain's two votes");
    }
    if (improper > 1) throw PreconditionError("more than one improper vote");
}

}  // namespace

bool swap_applicable(const Dataset& d, const SwapSpec& s) {
    check_indices(d, s);
    VoteMatrix m1 = to_matrix(d.votes[s.vote1], d.config.n());
    VoteMatrix m2 = to_matrix(d.votes[s.vote2], d.config.n());
    apply_to_rows(m1, m2, d.config.n(), s.position, s.cand1, s.cand2);
    return classify_matrix(m1, d.config.r(), d.config.n()) != VoteKind::Invalid &&
           classify_matrix(m2, d.config.r(), d.config.n()) != VoteKind::Invalid;
}

Dataset apply_swap(const Dataset& d, const SwapSpec& s) {
    if (!swap_applicable(d, s)) throw NotApplicableError("swap would produce an invalid vote");
    Dataset out = d;
    VoteMatrix m1 = to_matrix(d.votes[s.vote1], d.config.n());
    VoteMatrix m2 = to_matrix(d.votes[s.vote2], d.config.n());
    apply_to_rows(m1, m2, d.config.n(), s.position, s.cand1, s.cand2);
    out.votes[s.vote1] = from_matrix(m1, d.config.r(), d.config.n());
    out.votes[s.vote2] = from_matrix(m2, d.config.r(), d.config.n());
    return out;
}

std::vector<ResolvablePair> resolvable_pairs(const Dataset& d) {
    if (dataset_kind(d) != DatasetKind::Improper)
        throw PreconditionError("resolvable pairs exist in improper datasets only");
    int im = improper_vote_index(d);
    ImproperInfo info = *improper_info(d.votes[im]);
    std::vector<ResolvablePair> pairs;
    for (int i = 0; i < d.size(); ++i) {
        if (i == im) continue;
        const Entry& e = d.votes[i].at(info.position);
        if (!e.is_improper() && e.plus() == info.minus)
            pairs.push_back({im, i, info.position});
    }
    return pairs;
}

ChainResult resolve_collisions(const Dataset& d, int i1, int i2, std::mt19937_64* rng) {
    check_chain_context(d, i1, i2);
    Engine eng;
    eng.mats = to_mats(d);
    eng.active = {i1, i2};
    eng.max_steps = 2 * d.config.r();
    eng.rng = rng;
    eng.accept = [](const Mats&) { return true; };
    return finish(d, eng, "resolve_collisions");
}

ChainResult resolve_improper(const Dataset& d, const ResolvablePair& pair, std::mt19937_64* rng) {
    if (dataset_kind(d) != DatasetKind::Improper)
        throw PreconditionError("resolve_improper needs an improper dataset");
    if (pair.improper_vote != improper_vote_index(d))
        throw PreconditionError("pair does not name the improper vote");
    check_chain_context(d, pair.improper_vote, pair.proper_vote);
    ImproperInfo info = *improper_info(d.votes[pair.improper_vote]);
    if (pair.position != info.position)
        throw PreconditionError("pair position differs from the improper element");
    const Entry& partner = d.votes[pair.proper_vote].at(info.position);
    if (partner.is_improper() || partner.plus() != info.minus)
        throw PreconditionError("pair's proper vote must rank the subtracted candidate there");

    // Either positive candidate of the element may flow to the partner; the
    // engine starts with whichever cleans up faster and backtracks if needed.
    Engine eng;
    eng.mats = to_mats(d);
    eng.active = {pair.improper_vote, pair.proper_vote};
    eng.max_steps = 2 * d.config.r() + 1;
    eng.rng = rng;
    eng.accept = [i1 = pair.improper_vote, i2 = pair.proper_vote](const Mats& m) {
        return count_improper_rows(m.m[i1], m.r, m.n) == 0 &&
               count_improper_rows(m.m[i2], m.r, m.n) == 0;
    };

    std::array<int, 2> pluses = {info.plus1, info.plus2};
    struct First {
        SwapSpec s;
        int defects_after;
    };
    std::vector<First> firsts;
    for (int b : pluses) {
        SwapSpec s{pair.improper_vote, pair.proper_vote, info.position, b, info.minus};
        if (!swap_applicable(d, s)) continue;
        Dataset after = apply_swap(d, s);
        int defects = 0;
        for (int v : {pair.improper_vote, pair.proper_vote}) {
            VoteKind k = classify_vote(after.votes[v], d.config.n());
            if (k == VoteKind::Collision || k == VoteKind::ImproperWithCollision) ++defects;
        }
        firsts.push_back({s, defects});
    }
    std::stable_sort(firsts.begin(), firsts.end(),
                     [](const First& a, const First& b) { return a.defects_after < b.defects_after; });
    if (rng && firsts.size() == 2 && firsts[0].defects_after == firsts[1].defects_after &&
        std::uniform_int_distribution<int>(0, 1)(*rng))
        std::swap(firsts[0], firsts[1]);

    for (const First& f : firsts) {
        Engine attempt = eng;
        apply_to_rows(attempt.mats.m[f.s.vote1], attempt.mats.m[f.s.vote2], attempt.mats.n,
                      f.s.position, f.s.cand1, f.s.cand2);
        attempt.arrivals.insert({f.s.vote1, f.s.position, f.s.cand2});
        attempt.arrivals.insert({f.s.vote2, f.s.position, f.s.cand1});
        attempt.steps.push_back(f.s);
        try {
            return finish(d, attempt, "resolve_improper");
        } catch (const NonterminationError&) {
            // fall through to the other positive candidate
        }
    }
    throw NonterminationError("resolve_improper: no admissible swap chain found");
}

ChainResult extended_move_1(const Dataset& d, int improper_vote, int helper, int j, int jp,
                            std::mt19937_64* rng) {
    if (dataset_kind(d) != DatasetKind::Improper)
        throw PreconditionError("extended_move_1 needs an improper dataset");
    if (improper_vote != improper_vote_index(d))
        throw PreconditionError("extended_move_1 must start from the improper vote");
    check_chain_context(d, improper_vote, helper);
    ImproperInfo info = *improper_info(d.votes[improper_vote]);
    if (info.position != j) throw PreconditionError("improper element is not at position j");
    if (jp == j || jp < 0 || jp >= d.config.r())
        throw PreconditionError("target position out of range");
    int a = info.minus;
    const Entry& ha = d.votes[helper].at(jp);
    const Entry& hd = d.votes[helper].at(j);
    if (ha.is_improper() || ha.plus() != a)
        throw PreconditionError("helper must rank the subtracted candidate at the target position");
    if (hd.is_improper() || hd.plus() == a)
        throw PreconditionError("helper's candidate at the element position must differ");

    int e = d.votes[improper_vote].at(jp).plus();
    ChainResult res{d, {}};
    res.trace.start_kind = DatasetKind::Improper;
    res.trace.end_kind = DatasetKind::Improper;
    if (e == a) return res;  // already in place

    int dcand = hd.plus();
    Engine eng;
    eng.mats = to_mats(d);
    eng.active = {improper_vote, helper};
    eng.max_steps = 4 * d.config.r();
    eng.rng = rng;
    eng.protect.insert({improper_vote, jp, a});
    eng.accept = [&, improper_vote, helper, j, jp, a, dcand](const Mats& m) {
        if (count_improper_rows(m.m[helper], m.r, m.n) > 0) return false;
        if (count_improper_rows(m.m[improper_vote], m.r, m.n) != 1) return false;
        if (m.cell(improper_vote, jp, a) != 1) return false;
        if (m.cell(improper_vote, j, a) != -1) return false;
        for (int k = 0; k < m.n; ++k)
            if (m.cell(improper_vote, j, k) == 1 && k != info.plus1 && k != info.plus2 &&
                k != dcand)
                return false;
        return classify_matrix(m.m[improper_vote], m.r, m.n) == VoteKind::Improper;
    };
    SwapSpec first{improper_vote, helper, jp, e, a};
    if (!swap_applicable(d, first))
        throw PreconditionError("extended_move_1: opening swap not applicable");
    apply_to_rows(eng.mats.m[improper_vote], eng.mats.m[helper], eng.mats.n, jp, e, a);
    eng.arrivals.insert({improper_vote, jp, a});
    eng.arrivals.insert({helper, jp, e});
    eng.steps.push_back(first);
    return finish(d, eng, "extended_move_1");
}

ChainResult extended_move_2(const Dataset& d, int improper_vote, int helper, int j,
                            std::mt19937_64* rng) {
    if (dataset_kind(d) != DatasetKind::Improper)
        throw PreconditionError("extended_move_2 needs an improper dataset");
    if (improper_vote != improper_vote_index(d))
        throw PreconditionError("extended_move_2 must start from the improper vote");
    check_chain_context(d, improper_vote, helper);
    ImproperInfo info = *improper_info(d.votes[improper_vote]);
    if (info.position != j) throw PreconditionError("improper element is not at position j");
    const Entry& hd = d.votes[helper].at(j);
    if (hd.is_improper()) throw PreconditionError("helper vote must be proper");
    int dcand = hd.plus();
    if (dcand == info.minus || dcand == info.plus1 || dcand == info.plus2)
        throw PreconditionError(
            "helper's candidate at the element position must avoid the element");

    Engine base;
    base.mats = to_mats(d);
    base.active = {improper_vote, helper};
    base.max_steps = 4 * d.config.r();
    base.rng = rng;
    base.protect.insert({improper_vote, j, dcand});
    base.accept = [info, improper_vote, helper, j, dcand](const Mats& m) {
        if (count_improper_rows(m.m[helper], m.r, m.n) > 0) return false;
        if (count_improper_rows(m.m[improper_vote], m.r, m.n) != 1) return false;
        if (m.cell(improper_vote, j, info.minus) != -1) return false;
        if (m.cell(improper_vote, j, dcand) != 1) return false;
        // The element keeps one original positive candidate; the other one ends
        // up in the helper vote at the same position.
        int other;
        if (m.cell(improper_vote, j, info.plus1) == 1) other = info.plus2;
        else if (m.cell(improper_vote, j, info.plus2) == 1) other = info.plus1;
        else return false;
        if (m.cell(helper, j, other) != 1) return false;
        return classify_matrix(m.m[improper_vote], m.r, m.n) == VoteKind::Improper;
    };

    struct First {
        SwapSpec s;
        int defects_after;
    };
    std::vector<First> firsts;
    for (int b : {info.plus1, info.plus2}) {
        SwapSpec s{improper_vote, helper, j, b, dcand};
        if (!swap_applicable(d, s)) continue;
        Dataset after = apply_swap(d, s);
        int defects = 0;
        for (int v : {improper_vote, helper}) {
            VoteKind k = classify_vote(after.votes[v], d.config.n());
            if (k == VoteKind::Collision || k == VoteKind::ImproperWithCollision) ++defects;
        }
        firsts.push_back({s, defects});
    }
    std::stable_sort(firsts.begin(), firsts.end(),
                     [](const First& a, const First& b) { return a.defects_after < b.defects_after; });
    if (rng && firsts.size() == 2 && firsts[0].defects_after == firsts[1].defects_after &&
        std::uniform_int_distribution<int>(0, 1)(*rng))
        std::swap(firsts[0], firsts[1]);

    for (const First& f : firsts) {
        Engine attempt = base;
        apply_to_rows(attempt.mats.m[f.s.vote1], attempt.mats.m[f.s.vote2], attempt.mats.n,
                      f.s.position, f.s.cand1, f.s.cand2);
        attempt.arrivals.insert({f.s.vote1, f.s.position, f.s.cand2});
        attempt.arrivals.insert({f.s.vote2, f.s.position, f.s.cand1});
        attempt.steps.push_back(f.s);
        try {
            return finish(d, attempt, "extended_move_2");
        } catch (const NonterminationError&) {
        }
    }
    throw NonterminationError("extended_move_2: no admissible swap chain found");
}

ChainResult settle_with(const Dataset& d, const SwapSpec& first, int max_steps,
                        const std::function<bool(const Dataset&)>& accept,
                        std::mt19937_64* rng) {
    check_indices(d, first);
    if (!swap_applicable(d, first)) throw NotApplicableError("swap would produce an invalid vote");
    Engine eng;
    eng.mats = to_mats(d);
    eng.active = {first.vote1, first.vote2};
    eng.max_steps = max_steps;
    eng.rng = rng;
    Config cfg = d.config;
    eng.accept = [accept, cfg](const Mats& m) { return accept(to_dataset(m, cfg)); };
    apply_to_rows(eng.mats.m[first.vote1], eng.mats.m[first.vote2], eng.mats.n, first.position,
                  first.cand1, first.cand2);
    eng.arrivals.insert({first.vote1, first.position, first.cand2});
    eng.arrivals.insert({first.vote2, first.position, first.cand1});
    eng.steps.push_back(first);
    return finish(d, eng, "settle_with");
}

ChainResult swap_and_settle(const Dataset& d, const SwapSpec& s, std::mt19937_64* rng) {
    check_chain_context(d, s.vote1, s.vote2);
    if (!swap_applicable(d, s)) throw NotApplicableError("swap would produce an invalid vote");
    Engine eng;
    eng.mats = to_mats(d);
    eng.active = {s.vote1, s.vote2};
    eng.max_steps = 4 * d.config.r();
    eng.rng = rng;
    eng.accept = [](const Mats& m) {
        int improper = 0;
        for (size_t v = 0; v < m.m.size(); ++v) improper += count_improper_rows(m.m[v], m.r, m.n);
        return improper <= 1;
    };
    apply_to_rows(eng.mats.m[s.vote1], eng.mats.m[s.vote2], eng.mats.n, s.position, s.cand1,
                  s.cand2);
    eng.arrivals.insert({s.vote1, s.position, s.cand2});
    eng.arrivals.insert({s.vote2, s.position, s.cand1});
    eng.steps.push_back(s);
    return finish(d, eng, "swap_and_settle");
}

}  // namespace birkhoff
