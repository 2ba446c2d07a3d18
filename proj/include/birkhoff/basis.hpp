#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "birkhoff/fiber.hpp"
#include "birkhoff/types.hpp"

namespace birkhoff {

// An integer kernel element of the configuration matrix: a sparse signed
// combination of proper votes whose positive and negative parts share a
// sufficient statistic. Keys are canonical votes, values are nonzero.
struct Move {
    std::map<Vote, int> z;

    // Sum of the positive entries; the negative part has the same mass.
    int degree() const;
    bool empty() const { return z.empty(); }
    friend auto operator<=>(const Move&, const Move&) = default;
};

Move negate_move(Move m);
// Sign normalization: the lexicographically smallest vote appearing in the
// move ends up on the positive side. Idempotent; canon(z) == canon(-z).
Move canonical_move(Move m);
// True iff A z = 0: per position and candidate, signed counts cancel.
bool is_kernel_move(int n, int r, const Move& m);
// x + z when every resulting count stays nonnegative, otherwise nullopt.
std::optional<FiberElement> apply_move(const FiberElement& x, const Move& m);

// Positive or negative part as a frequency vector.
FiberElement move_part(const Move& m, int sign);

// A count polynomial over the binomial basis: sum of c * C(n, m) terms.
struct CountPolynomial {
    std::vector<std::pair<int, long long>> terms;  // (m, c), ascending m

    long long evaluate(int n) const;
    friend auto operator<=>(const CountPolynomial&, const CountPolynomial&) = default;
};

// Exact brute count of moves in a minimal Markov basis of the given degree:
// degree 2 sums (|fiber| - 1) over all two-vote sufficient statistics on [n],
// degree 3 sums (components under degree-2 moves - 1) over all three-vote
// statistics. Zero when r > n (no votes exist); throws TooLargeError beyond
// desk scale.
long long minimal_basis_counts(int n, int r, int degree);

// The closed-form count polynomial for r in {2,3,4,5}, degree in {2,3}.
// Throws UnsupportedError for other r.
CountPolynomial count_formula(int r, int degree);

// A Markov basis of moves of degree <= max_degree (2 or 3): a spanning star
// per two-vote fiber plus one connector per extra degree-2 component of each
// three-vote fiber. Canonicalized, sorted, duplicate-free.
std::vector<Move> enumerate_basis_moves(int n, int r, int max_degree = 3);

// One proposal of the random walk: draw `degree` uniform proper votes, apply
// an independent uniform shuffle of the candidates within each position, and
// return the difference unless a collision appears or nothing changed.
std::optional<Move> random_move(std::mt19937_64& rng, const Config& cfg, int degree);

// Basis text format: one move per line, "+(1,2) +(2,3) -(1,3) -(3,2)" with
// 1-based candidate tuples; entries repeat when a coefficient exceeds one.
std::string format_move(const Move& m);
Move parse_move(const std::string& line, int n);
std::string format_basis(const std::vector<Move>& basis);
std::vector<Move> parse_basis(const std::string& text, int n);

}  // namespace birkhoff
