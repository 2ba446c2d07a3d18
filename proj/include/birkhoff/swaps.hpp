#pragma once

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "birkhoff/types.hpp"

namespace birkhoff {

// Exchange of two candidates between two votes at one position: vote1 gives up
// cand1 and receives cand2, vote2 the reverse. All indices 0-based.
struct SwapSpec {
    int vote1;
    int vote2;
    int position;
    int cand1;
    int cand2;
    friend auto operator<=>(const SwapSpec&, const SwapSpec&) = default;
};

struct SwapTrace {
    std::vector<SwapSpec> steps;
    DatasetKind start_kind = DatasetKind::Other;
    DatasetKind end_kind = DatasetKind::Other;
};

struct ChainResult {
    Dataset dataset;
    SwapTrace trace;
};

// An improper vote together with a proper vote that holds the subtracted
// candidate at the improper element's position.
struct ResolvablePair {
    int improper_vote;
    int proper_vote;
    int position;
    friend auto operator<=>(const ResolvablePair&, const ResolvablePair&) = default;
};

struct ImproperInfo {
    int position;
    int plus1;
    int plus2;
    int minus;
};

// Data of the unique improper entry of a vote, if any.
std::optional<ImproperInfo> improper_info(const Vote& v);
// Index of the unique improper vote of an improper dataset; -1 when proper.
int improper_vote_index(const Dataset& d);

// A swap applies when both resulting votes are still votes (possibly with a
// collision or an improper element), never anything invalid.
bool swap_applicable(const Dataset& d, const SwapSpec& s);
Dataset apply_swap(const Dataset& d, const SwapSpec& s);

// All pairs of an improper dataset through which the improper element can be
// resolved. Nonempty whenever the sufficient statistic is nonnegative.
std::vector<ResolvablePair> resolvable_pairs(const Dataset& d);

// Repeated swapping between votes i1 and i2 until neither carries a collision.
// The rest of the dataset must already be collision-free.
ChainResult resolve_collisions(const Dataset& d, int i1, int i2,
                               std::mt19937_64* rng = nullptr);

// Turn an improper dataset into a proper one through the given pair: the
// improper element absorbs its subtracted candidate from the pair's proper
// vote, and the displaced candidates cascade between the two votes.
ChainResult resolve_improper(const Dataset& d, const ResolvablePair& pair,
                             std::mt19937_64* rng = nullptr);

// Move the subtracted candidate's eventual landing spot of the improper vote
// to position jp, using a proper helper vote that ranks it there. Afterwards
// the improper vote ranks that candidate at jp and still carries an improper
// element at position j (two of its three positive candidates survive).
ChainResult extended_move_1(const Dataset& d, int improper_vote, int helper, int j, int jp,
                            std::mt19937_64* rng = nullptr);

// Replace one positive candidate of the improper element by the candidate the
// helper vote ranks at the element's position.
ChainResult extended_move_2(const Dataset& d, int improper_vote, int helper, int j,
                            std::mt19937_64* rng = nullptr);

// Apply an arbitrary applicable swap, then settle the two touched votes until
// the dataset is proper or has a single improper vote.
ChainResult swap_and_settle(const Dataset& d, const SwapSpec& s,
                            std::mt19937_64* rng = nullptr);

// Apply the given opening swap and clean up collisions among its two votes
// until the predicate holds, backtracking over cleanup choices.
ChainResult settle_with(const Dataset& d, const SwapSpec& first, int max_steps,
                        const std::function<bool(const Dataset&)>& accept,
                        std::mt19937_64* rng = nullptr);

}  // namespace birkhoff
