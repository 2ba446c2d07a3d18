#include "birkhoff/connector.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "birkhoff/errors.hpp"
#include "birkhoff/io.hpp"
#include "json.hpp"

namespace birkhoff {

int concurrence(const Vote& a, const Vote& b) {
    if (a.size() != b.size()) throw PreconditionError("concurrence needs votes of equal length");
    if (!a.is_proper() || !b.is_proper())
        throw PreconditionError("concurrence is defined for proper votes");
    int c = 0;
    for (int j = 0; j < a.size(); ++j)
        if (a.at(j).plus() == b.at(j).plus()) ++c;
    return c;
}

namespace {

int proper_at(const Vote& v, int j) {
    const Entry& e = v.at(j);
    if (e.is_improper()) throw PreconditionError("expected a proper entry");
    return e.plus();
}

// Whether the vote gives candidate k a positive weight anywhere.
bool holds_candidate(const Vote& v, int k) {
    for (const Entry& e : v.entries()) {
        if (e.is_improper()) {
            if (e.plus1() == k || e.plus2() == k) return true;
        } else if (e.plus() == k) {
            return true;
        }
    }
    return false;
}

bool is_unfrozen(const std::vector<bool>* frozen, int i) {
    return frozen == nullptr || !(*frozen)[static_cast<size_t>(i)];
}

void check_frozen_mask(const Dataset& d, const std::vector<bool>* frozen) {
    if (frozen && static_cast<int>(frozen->size()) != d.size())
        throw PreconditionError("frozen mask size differs from the dataset");
}

void check_target(const Dataset& d, const Vote& target) {
    if (target.size() != d.config.r()) throw PreconditionError("target vote length differs");
    if (!target.is_proper()) throw PreconditionError("target vote must be proper");
    if (classify_vote(target, d.config.n()) != VoteKind::Proper)
        throw PreconditionError("target vote must be proper");
}

bool pair_valid(const Dataset& d, const ResolvablePair& p) {
    if (dataset_kind(d) != DatasetKind::Improper) return false;
    std::vector<ResolvablePair> pairs = resolvable_pairs(d);
    return std::find(pairs.begin(), pairs.end(), p) != pairs.end();
}

OpRecord make_op(const Dataset& before, std::array<int, 2> votes,
                 const std::vector<SwapSpec>& legs,
                 const std::optional<ResolvablePair>& from_pair) {
    SwapTrace trace;
    trace.start_kind = dataset_kind(before);
    Dataset cur = before;
    for (const SwapSpec& s : legs) {
        cur = apply_swap(cur, s);
        trace.steps.push_back(s);
    }
    trace.end_kind = dataset_kind(cur);
    return OpRecord{votes, std::move(trace), from_pair, std::nullopt, std::move(cur)};
}

OpRecord op_from_chain(std::array<int, 2> votes, ChainResult&& res,
                       const std::optional<ResolvablePair>& from_pair) {
    return OpRecord{votes, std::move(res.trace), from_pair, std::nullopt, std::move(res.dataset)};
}

std::vector<OpRecord> drive_proper(const Dataset& d, int i, const Vote& target,
                                   const std::vector<bool>* frozen) {
    const int r = d.config.r();
    const int N = d.size();
    if (dataset_kind(d) != DatasetKind::Proper)
        throw PreconditionError("increase_concurrence_proper needs a proper dataset");
    if (i < 0 || i >= N) throw PreconditionError("vote index out of range");
    check_frozen_mask(d, frozen);
    check_target(d, target);
    if (!is_unfrozen(frozen, i)) throw PreconditionError("vote i must not be frozen");
    const Vote& v = d.votes[i];
    const Vote& w = target;
    if (concurrence(v, w) >= r) throw PreconditionError("vote already matches the target");

    // Case 1: some candidate sits in both votes but at different positions, so
    // a round trip through a helper rotates it into place.
    for (int jhat = 0; jhat < r; ++jhat) {
        int b = proper_at(w, jhat);
        if (proper_at(v, jhat) == b) continue;
        int j2 = -1;
        for (int j = 0; j < r && j2 < 0; ++j)
            if (j != jhat && proper_at(v, j) == b) j2 = j;
        if (j2 < 0) continue;
        int a = proper_at(v, jhat);
        int helper = -1;
        for (int h = 0; h < N; ++h) {
            if (h == i || !is_unfrozen(frozen, h)) continue;
            if (proper_at(d.votes[h], jhat) != b) continue;
            if (helper < 0) helper = h;
            if (proper_at(d.votes[h], j2) == a) {
                helper = h;
                break;
            }
        }
        if (helper < 0)
            throw PreconditionError("no unfrozen vote ranks the needed candidate at its position");
        OpRecord op = make_op(d, {i, helper},
                              {{i, helper, jhat, a, b}, {i, helper, j2, b, a}}, std::nullopt);
        if (dataset_kind(op.after) == DatasetKind::Improper)
            op.pair = ResolvablePair{helper, i, j2};
        std::vector<OpRecord> ops;
        ops.push_back(std::move(op));
        return ops;
    }

    // Case 2: all common candidates agree in position, so the first mismatch
    // imports a candidate the vote does not hold yet.
    int jhat = -1;
    for (int j = 0; j < r && jhat < 0; ++j)
        if (proper_at(v, j) != proper_at(w, j)) jhat = j;
    int a = proper_at(v, jhat);
    int b = proper_at(w, jhat);
    int helper2 = -1;
    for (int h = 0; h < N && helper2 < 0; ++h) {
        if (h == i || !is_unfrozen(frozen, h)) continue;
        if (proper_at(d.votes[h], jhat) == b) helper2 = h;
    }
    if (helper2 < 0)
        throw PreconditionError("no unfrozen vote ranks the needed candidate at its position");

    std::vector<OpRecord> ops;
    if (!holds_candidate(d.votes[helper2], a)) {
        ops.push_back(make_op(d, {i, helper2}, {{i, helper2, jhat, a, b}}, std::nullopt));
        return ops;
    }

    // The helper holds a as well, so a second helper takes that copy first;
    // any improper leftover resolves between the two helpers right away.
    int helper3 = -1;
    for (int h = 0; h < N && helper3 < 0; ++h) {
        if (h == i || h == helper2 || !is_unfrozen(frozen, h)) continue;
        if (!holds_candidate(d.votes[h], a)) helper3 = h;
    }
    if (helper3 < 0)
        throw PreconditionError("every unfrozen vote holds the displaced candidate");
    int j2 = -1;
    for (int j = 0; j < r; ++j)
        if (proper_at(d.votes[helper2], j) == a) j2 = j;
    int dd = -1;
    if (!holds_candidate(d.votes[helper2], proper_at(d.votes[helper3], j2)))
        dd = proper_at(d.votes[helper3], j2);
    for (int k = 0; k < d.config.n() && dd < 0; ++k)
        if (holds_candidate(d.votes[helper3], k) && !holds_candidate(d.votes[helper2], k)) dd = k;

    OpRecord op1 = make_op(d, {helper2, helper3}, {{helper2, helper3, j2, a, dd}}, std::nullopt);
    if (dataset_kind(op1.after) == DatasetKind::Improper)
        op1.pair = ResolvablePair{helper3, helper2, j2};
    OpRecord op2 = make_op(op1.after, {i, helper2}, {{i, helper2, jhat, a, b}}, op1.pair);
    op2.pair = op1.pair;
    std::optional<ResolvablePair> pending = op2.pair;
    Dataset reached = op2.after;
    ops.push_back(std::move(op1));
    ops.push_back(std::move(op2));
    if (pending) {
        ChainResult res = resolve_improper(reached, *pending, nullptr);
        ops.push_back(op_from_chain({pending->improper_vote, pending->proper_vote},
                                    std::move(res), pending));
    }
    return ops;
}

std::vector<OpRecord> drive_improper(const Dataset& d, const ResolvablePair& pair,
                                     const Vote& target, const std::vector<bool>* frozen) {
    const int r = d.config.r();
    const int N = d.size();
    if (dataset_kind(d) != DatasetKind::Improper)
        throw PreconditionError("increase_concurrence_improper needs an improper dataset");
    check_frozen_mask(d, frozen);
    check_target(d, target);
    const int im = pair.improper_vote;
    const int pr = pair.proper_vote;
    if (im != improper_vote_index(d)) throw PreconditionError("pair does not name the improper vote");
    if (pr < 0 || pr >= N || pr == im) throw PreconditionError("pair's proper vote out of range");
    ImproperInfo info = *improper_info(d.votes[im]);
    if (pair.position != info.position)
        throw PreconditionError("pair position differs from the improper element");
    const Entry& witness = d.votes[pr].at(info.position);
    if (witness.is_improper() || witness.plus() != info.minus)
        throw PreconditionError("pair's proper vote must rank the subtracted candidate there");
    if (!is_unfrozen(frozen, im) || !is_unfrozen(frozen, pr))
        throw PreconditionError("pair votes must not be frozen");
    const Vote& w = target;
    if (concurrence(d.votes[pr], w) >= r)
        throw PreconditionError("pair's proper vote already matches the target");

    const int jhat = info.position;
    const int alpha = info.minus;
    std::vector<OpRecord> ops;

    // Case 1: the target ranks the subtracted candidate right at the element's
    // position, which the pair's vote already does too; a further witness
    // absorbs the element and the pair's vote keeps its match.
    if (proper_at(w, jhat) == alpha) {
        int i3 = -1;
        for (int h = 0; h < N && i3 < 0; ++h) {
            if (h == im || h == pr || !is_unfrozen(frozen, h)) continue;
            const Entry& e = d.votes[h].at(jhat);
            if (!e.is_improper() && e.plus() == alpha) i3 = h;
        }
        if (i3 < 0)
            throw PreconditionError("no further unfrozen vote ranks the subtracted candidate there");
        ChainResult res = resolve_improper(d, {im, i3, jhat}, nullptr);
        ops.push_back(op_from_chain({im, i3}, std::move(res), pair));
        return ops;
    }

    int jprime = -1;
    for (int j = 0; j < r && jprime < 0; ++j)
        if (j != jhat && proper_at(w, j) == alpha) jprime = j;

    if (jprime >= 0) {
        // Case 2: the subtracted candidate belongs elsewhere in the target.
        // Route it through the element's position: the pair's vote hands it to
        // the element and receives its own candidate back at jprime.
        Dataset cur = d;
        int dtake = proper_at(cur.votes[pr], jprime);
        if (proper_at(cur.votes[im], jprime) != alpha) {
            int i3 = -1;
            for (int h = 0; h < N && i3 < 0; ++h) {
                if (h == im || h == pr || !is_unfrozen(frozen, h)) continue;
                const Entry& e = cur.votes[h].at(jprime);
                if (!e.is_improper() && e.plus() == alpha) i3 = h;
            }
            if (i3 < 0)
                throw PreconditionError(
                    "no unfrozen vote ranks the subtracted candidate at its target position");
            ChainResult res = extended_move_1(cur, im, i3, jhat, jprime, nullptr);
            cur = res.dataset;
            ops.push_back(op_from_chain({im, i3}, std::move(res), pair));
            ops.back().pair = pair;
        }
        OpRecord op = make_op(cur, {pr, im},
                              {{pr, im, jhat, alpha, dtake}, {pr, im, jprime, dtake, alpha}},
                              pair);
        if (dataset_kind(op.after) == DatasetKind::Improper)
            op.pair = ResolvablePair{im, pr, jhat};
        ops.push_back(std::move(op));
        return ops;
    }

    // Case 3: the target avoids the subtracted candidate entirely, so the
    // element must hand over whatever the target wants at its position.
    int delta = proper_at(w, jhat);
    Dataset cur = d;
    if (delta != info.plus1 && delta != info.plus2) {
        int i3 = -1;
        for (int h = 0; h < N && i3 < 0; ++h) {
            if (h == im || h == pr || !is_unfrozen(frozen, h)) continue;
            const Entry& e = cur.votes[h].at(jhat);
            if (!e.is_improper() && e.plus() == delta) i3 = h;
        }
        if (i3 < 0)
            throw PreconditionError("no unfrozen vote ranks the wanted candidate at the element");
        ChainResult res = extended_move_2(cur, im, i3, jhat, nullptr);
        cur = res.dataset;
        ops.push_back(op_from_chain({im, i3}, std::move(res), pair));
        ops.back().pair = pair;
    }

    int j2 = -1;
    for (int j = 0; j < r && j2 < 0; ++j) {
        const Entry& e = cur.votes[pr].at(j);
        if (!e.is_improper() && e.plus() == delta) j2 = j;
    }
    if (j2 >= 0) {
        // Case 3a: the pair's vote holds the wanted candidate itself, so the
        // element migrates to that position while both wishes are honored.
        OpRecord op = make_op(cur, {pr, im},
                              {{pr, im, jhat, alpha, delta}, {pr, im, j2, delta, alpha}}, pair);
        if (dataset_kind(op.after) == DatasetKind::Improper)
            op.pair = ResolvablePair{im, pr, j2};
        ops.push_back(std::move(op));
        return ops;
    }

    // Case 3b: a single exchange settles it, unless the improper vote ranks
    // the subtracted candidate twice; then one copy parks elsewhere first.
    int posa = 0;
    for (int j = 0; j < r; ++j) {
        const Entry& e = cur.votes[im].at(j);
        if (!e.is_improper() && e.plus() == alpha) ++posa;
    }
    if (posa >= 2) {
        int i4 = -1;
        for (int h = 0; h < N && i4 < 0; ++h) {
            if (h == im || h == pr || !is_unfrozen(frozen, h)) continue;
            if (!holds_candidate(cur.votes[h], alpha)) i4 = h;
        }
        if (i4 < 0)
            throw PreconditionError("every unfrozen vote ranks the subtracted candidate somewhere");
        auto accept = [im, i4, jhat, alpha, delta, n = d.config.n()](const Dataset& out) {
            std::optional<ImproperInfo> oi = improper_info(out.votes[im]);
            if (!oi || oi->position != jhat || oi->minus != alpha) return false;
            if (oi->plus1 != delta && oi->plus2 != delta) return false;
            int cnt = 0;
            for (int j = 0; j < out.votes[im].size(); ++j) {
                const Entry& e = out.votes[im].at(j);
                if (!e.is_improper() && e.plus() == alpha) ++cnt;
            }
            if (cnt != 1) return false;
            return classify_vote(out.votes[i4], n) == VoteKind::Proper;
        };
        bool done = false;
        for (int j = 0; j < r && !done; ++j) {
            const Entry& e = cur.votes[im].at(j);
            if (e.is_improper() || e.plus() != alpha) continue;
            SwapSpec first{im, i4, j, alpha, proper_at(cur.votes[i4], j)};
            if (!swap_applicable(cur, first)) continue;
            try {
                ChainResult res = settle_with(cur, first, 4 * r, accept, nullptr);
                cur = res.dataset;
                ops.push_back(op_from_chain({im, i4}, std::move(res), pair));
                ops.back().pair = pair;
                done = true;
            } catch (const NonterminationError&) {
            }
        }
        if (!done) throw NonterminationError("could not thin the subtracted candidate's copies");
    }
    ops.push_back(make_op(cur, {pr, im}, {{pr, im, jhat, alpha, delta}}, pair));
    return ops;
}

DriveResult flatten(std::vector<OpRecord>&& ops) {
    DriveResult res{ops.back().after, {}, {}, ops.back().pair};
    std::set<int> touched;
    for (OpRecord& op : ops) {
        touched.insert(op.votes[0]);
        touched.insert(op.votes[1]);
        res.traces.push_back(std::move(op.trace));
    }
    res.touched.assign(touched.begin(), touched.end());
    return res;
}

ResolvablePair pick_pair(const Dataset& d, const std::vector<bool>& frozen) {
    for (const ResolvablePair& p : resolvable_pairs(d))
        if (!frozen[static_cast<size_t>(p.proper_vote)]) return p;
    throw NonterminationError("no unfrozen vote can resolve the improper element");
}

}  // namespace

DriveResult increase_concurrence_proper(const Dataset& d, int i, const Vote& target,
                                        const std::vector<bool>* frozen) {
    return flatten(drive_proper(d, i, target, frozen));
}

DriveResult increase_concurrence_improper(const Dataset& d, const ResolvablePair& pair,
                                          const Vote& target, const std::vector<bool>* frozen) {
    return flatten(drive_improper(d, pair, target, frozen));
}

RawChain connect_chain(const Dataset& from, const Dataset& to) {
    if (from.config != to.config) throw CompatibilityError("datasets use different configurations");
    if (from.size() != to.size()) throw FiberMismatchError("datasets have different sizes");
    if (dataset_kind(from) != DatasetKind::Proper || dataset_kind(to) != DatasetKind::Proper)
        throw PreconditionError("connect needs proper datasets");
    if (suff_stat(from) != suff_stat(to))
        throw FiberMismatchError("datasets lie on different fibers");

    const int N = from.size();
    const int r = from.config.r();
    RawChain chain{from, {}};
    Dataset state = from;
    std::vector<bool> frozen(static_cast<size_t>(N), false);
    std::vector<bool> matched(static_cast<size_t>(N), false);
    std::optional<ResolvablePair> pair;
    int remaining = N;
    int guard = 0;
    const int limit = 12 * N * r + 8 * N + 64;

    while (remaining > 0) {
        if (++guard > limit) throw NonterminationError("connect exceeded its operation budget");
        if (dataset_kind(state) == DatasetKind::Proper) {
            pair.reset();
            // Greedy matching: highest concurrence first, ties by vote order.
            int bi = -1, bt = -1, bc = -1;
            std::optional<std::tuple<Vote, Vote, int, int>> best_key;
            for (int i = 0; i < N; ++i) {
                if (frozen[static_cast<size_t>(i)]) continue;
                for (int t = 0; t < N; ++t) {
                    if (matched[static_cast<size_t>(t)]) continue;
                    int c = concurrence(state.votes[i], to.votes[t]);
                    std::tuple<Vote, Vote, int, int> key{state.votes[i], to.votes[t], i, t};
                    if (c > bc || (c == bc && key < *best_key)) {
                        bc = c;
                        bi = i;
                        bt = t;
                        best_key = std::move(key);
                    }
                }
            }
            if (bc == r) {
                frozen[static_cast<size_t>(bi)] = true;
                matched[static_cast<size_t>(bt)] = true;
                --remaining;
                continue;
            }
            std::vector<OpRecord> ops = drive_proper(state, bi, to.votes[bt], &frozen);
            for (OpRecord& op : ops) {
                state = op.after;
                pair = op.pair;
                chain.ops.push_back(std::move(op));
            }
        } else {
            if (!pair || frozen[static_cast<size_t>(pair->proper_vote)] ||
                !pair_valid(state, *pair))
                pair = pick_pair(state, frozen);
            int pr = pair->proper_vote;
            int bt = -1, bc = -1;
            std::optional<std::tuple<Vote, int>> best_key;
            for (int t = 0; t < N; ++t) {
                if (matched[static_cast<size_t>(t)]) continue;
                int c = concurrence(state.votes[pr], to.votes[t]);
                std::tuple<Vote, int> key{to.votes[t], t};
                if (c > bc || (c == bc && key < *best_key)) {
                    bc = c;
                    bt = t;
                    best_key = std::move(key);
                }
            }
            if (bc == r) {
                frozen[static_cast<size_t>(pr)] = true;
                matched[static_cast<size_t>(bt)] = true;
                --remaining;
                continue;
            }
            std::vector<OpRecord> ops = drive_improper(state, *pair, to.votes[bt], &frozen);
            for (OpRecord& op : ops) {
                state = op.after;
                pair = op.pair;
                chain.ops.push_back(std::move(op));
            }
        }
    }

    std::vector<Vote> got = state.votes;
    std::vector<Vote> want = to.votes;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    if (got != want) throw CompatibilityError("connect did not reach the target dataset");
    return chain;
}

ConnectionPath segment_decomposition(const RawChain& chain) {
    if (dataset_kind(chain.start) != DatasetKind::Proper)
        throw PreconditionError("a chain starts from a proper dataset");
    ConnectionPath path{chain.start, {}};
    Dataset prev_anchor = chain.start;
    SuffStat stat = suff_stat(chain.start);
    std::vector<SwapTrace> acc;

    auto emit = [&](const Dataset& anchor) {
        if (dataset_kind(anchor) != DatasetKind::Proper)
            throw CompatibilityError("segment endpoint is not proper");
        if (suff_stat(anchor) != stat)
            throw CompatibilityError("segment changes the sufficient statistic");
        std::map<Vote, int> move;
        for (const Vote& v : anchor.votes) ++move[v];
        for (const Vote& v : prev_anchor.votes) --move[v];
        std::erase_if(move, [](const auto& kv) { return kv.second == 0; });
        if (move.empty()) return;
        std::vector<int> touched;
        for (int i = 0; i < prev_anchor.size(); ++i)
            if (!(prev_anchor.votes[i] == anchor.votes[i])) touched.push_back(i);
        if (touched.size() > 3) throw CompatibilityError("segment touches more than three votes");
        path.segments.push_back(
            Segment{prev_anchor, anchor, std::move(touched), std::move(move), std::move(acc)});
        acc.clear();
        prev_anchor = anchor;
    };

    for (size_t t = 0; t < chain.ops.size(); ++t) {
        const OpRecord& op = chain.ops[t];
        acc.push_back(op.trace);
        if (dataset_kind(op.after) == DatasetKind::Proper) {
            emit(op.after);
            continue;
        }
        if (!op.pair) throw CompatibilityError("improper state lacks a designated pair");
        if (!pair_valid(op.after, *op.pair))
            throw CompatibilityError("designated pair is not resolvable");
        emit(resolve_improper(op.after, *op.pair, nullptr).dataset);
        if (t + 1 < chain.ops.size()) {
            const std::optional<ResolvablePair>& next = chain.ops[t + 1].from_pair;
            if (!next) throw CompatibilityError("step out of an improper state lacks its pair");
            if (*next != *op.pair) {
                if (!pair_valid(op.after, *next))
                    throw CompatibilityError("designated pair is not resolvable");
                emit(resolve_improper(op.after, *next, nullptr).dataset);
            }
        }
    }
    if (!acc.empty() && !path.segments.empty()) {
        Segment& last = path.segments.back();
        last.traces.insert(last.traces.end(), acc.begin(), acc.end());
    }
    return path;
}

ConnectionPath connect(const Dataset& from, const Dataset& to) {
    ConnectionPath path = segment_decomposition(connect_chain(from, to));
    int bound = 10 * from.size() * from.config.r();
    if (static_cast<int>(path.segments.size()) > bound)
        throw NonterminationError("connect produced too many segments");
    return path;
}

std::string path_to_json(const ConnectionPath& path) {
    nlohmann::json segs = nlohmann::json::array();
    for (const Segment& s : path.segments) {
        nlohmann::json move = nlohmann::json::object();
        for (const auto& [vote, count] : s.move) move[vote_tuple(vote)] = count;
        nlohmann::json touched = nlohmann::json::array();
        for (int i : s.touched) touched.push_back(i + 1);
        segs.push_back({{"move", std::move(move)}, {"touched", std::move(touched)}});
    }
    return nlohmann::json{{"segments", std::move(segs)}}.dump();
}

}  // namespace birkhoff
