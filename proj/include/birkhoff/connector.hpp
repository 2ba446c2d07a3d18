#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "birkhoff/swaps.hpp"
#include "birkhoff/types.hpp"

namespace birkhoff {

// Number of positions at which two proper votes of equal length agree.
int concurrence(const Vote& a, const Vote& b);

// One bookkeeping step of a connecting walk: the two votes that exchanged
// candidates, the swaps performed, the dataset reached, and the designated
// resolvable pairs of the surrounding improper states. from_pair belongs to
// the state the step started from, pair to the state it produced; both are
// empty when the respective state is proper.
struct OpRecord {
    std::array<int, 2> votes;
    SwapTrace trace;
    std::optional<ResolvablePair> from_pair;
    std::optional<ResolvablePair> pair;
    Dataset after;
};

// A walk between datasets of one fiber, starting from a proper dataset and
// alternating through proper and improper states.
struct RawChain {
    Dataset start;
    std::vector<OpRecord> ops;
};

// Outcome of one concurrence-increasing drive: the dataset reached, the votes
// that changed, the underlying swap chains, and the designated resolvable
// pair when the result is improper.
struct DriveResult {
    Dataset dataset;
    std::vector<int> touched;
    std::vector<SwapTrace> traces;
    std::optional<ResolvablePair> pair;
};

// Raise the concurrence of vote i with the target by at least one, swapping
// only with votes not excluded by the frozen mask. The dataset must be
// proper; the result is proper or improper with vote i part of the
// designated pair.
DriveResult increase_concurrence_proper(const Dataset& d, int i, const Vote& target,
                                        const std::vector<bool>* frozen = nullptr);

// Same for an improper dataset, driving the pair's proper vote toward the
// target while keeping the improper element confined to the pair.
DriveResult increase_concurrence_improper(const Dataset& d, const ResolvablePair& pair,
                                          const Vote& target,
                                          const std::vector<bool>* frozen = nullptr);

// A difference of two proper datasets of one fiber that touches at most
// three votes. The move maps each vote to its net change of multiplicity.
struct Segment {
    Dataset from;
    Dataset to;
    std::vector<int> touched;
    std::map<Vote, int> move;
    std::vector<SwapTrace> traces;
};

struct ConnectionPath {
    Dataset start;
    std::vector<Segment> segments;
};

// Deterministic walk from one proper dataset to another with the same
// sufficient statistic, recording every step.
RawChain connect_chain(const Dataset& from, const Dataset& to);

// Collapse a walk into proper-to-proper segments by resolving each improper
// state through its designated pair. Every segment touches at most three
// votes and preserves the sufficient statistic.
ConnectionPath segment_decomposition(const RawChain& chain);

// connect = segment_decomposition(connect_chain(from, to)).
ConnectionPath connect(const Dataset& from, const Dataset& to);

// {"segments":[{"move":{"(1,3,2)":1,...},"touched":[1,2,3]},...]} with
// 1-based vote indices and candidate numbers.
std::string path_to_json(const ConnectionPath& path);

}  // namespace birkhoff
