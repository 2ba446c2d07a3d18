#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "birkhoff/basis.hpp"
#include "birkhoff/model.hpp"
#include "birkhoff/types.hpp"

namespace birkhoff {

enum class WalkKind { ProperMoves, ExtendedSwap };

struct ChainConfig {
    long long steps = 1000;
    long long burn_in = 0;  // must stay below steps
    long long thin = 1;
    std::uint64_t seed = 0;
    WalkKind walk = WalkKind::ProperMoves;
};

void check_chain_config(const ChainConfig& cfg);

struct ChainState {
    Dataset current;
    long long step = 0;
    std::mt19937_64 rng;
};

// Seed for the k-th of several parallel chains: a splitmix64 finalizer over
// master + (k+1) * golden-ratio increment, so streams never collide.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream);

// Fresh chain at the start dataset; validates config and start against walk.
ChainState make_chain(const Dataset& start, const ChainConfig& cfg);

// One Metropolis step of the uniform walk over the proper fiber: propose a
// random move of degree 2 or 3 (probability 1/2 each), apply it when the
// result stays nonnegative, hold otherwise. Symmetric proposal, so the
// stationary distribution is uniform. Holds count as steps.
ChainState& mh_uniform_step(ChainState& state, const ChainConfig& cfg);

// One extended-walk step: swap the holdings of two uniformly chosen votes at
// a uniform position (picking uniformly between the two positive candidates
// of an improper element), then settle the touched votes. States are proper
// or single-improper datasets; inapplicable or unsettleable proposals hold.
ChainState& extended_step(ChainState& state, const ChainConfig& cfg);

// Dispatch on cfg.walk.
ChainState& chain_step(ChainState& state, const ChainConfig& cfg);

// Post burn-in, thinned states of a fresh chain; only proper states are
// emitted (extended-walk improper states are skipped, not samples).
std::vector<Dataset> sample_chain(const Dataset& start, const ChainConfig& cfg);

// Exact proposal distribution of the uniform walk: probability of each
// nonzero move over vote draws and per-position shuffles, at the 1/2, 1/2
// degree mix. Probabilities sum to the emission rate (holds are the rest).
// Small configs only; throws TooLargeError beyond desk scale.
std::map<Move, double> proposal_distribution(const Config& cfg);

struct ModelParams {
    Config config;
    Weights psi;  // r x n row-major, strictly positive
};

struct PValue {
    double p = 0;
    double se = 0;
    double observed = 0;
};

using DatasetStatistic = std::function<double(const Dataset&)>;

// Conditional Monte Carlo p-value: P(statistic >= observed) over the uniform
// distribution on the fiber of suff_stat(observed), the observed dataset
// included in the exceedance set. Standard error by batch means over
// floor(sqrt(K)) batches of the K thinned indicator samples.
PValue estimate_pvalue(const Dataset& observed, const DatasetStatistic& statistic,
                       const ChainConfig& cfg);

// Goodness-of-fit statistic: sum over all proper votes of
// (count - N p)^2 / (N p) with p the model probability.
double chi_square_stat(const Dataset& d, const ModelParams& params);

double log_likelihood(const Dataset& d, const ModelParams& params);

// Gradient of the log-likelihood with respect to the entrywise log-weights:
// g[j][k] = t[j][k] - N * marginal[j][k]. Row sums vanish (gauge direction).
Weights log_likelihood_gradient(const Dataset& d, const ModelParams& params);

struct FitConfig {
    int max_iters = 10000;
    double floor = 1e-9;  // positivity floor on psi entries
};

// Maximum-likelihood weights under the per-position sum-to-one gauge, by
// gradient ascent with backtracking line search. Converged when the gradient
// max-norm is at most tol; throws NonconvergenceError past max_iters.
ModelParams fit_mle(const Dataset& data, const FitConfig& config, double tol);

}  // namespace birkhoff
