#include "birkhoff/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "birkhoff/errors.hpp"
#include "birkhoff/fiber.hpp"
#include "birkhoff/swaps.hpp"

namespace birkhoff {

namespace {

void check_proper(const Dataset& d, const char* what) {
    if (dataset_kind(d) != DatasetKind::Proper)
        throw PreconditionError(std::string(what) + " needs a proper dataset");
}

void check_params(const ModelParams& p) {
    if (static_cast<long long>(p.psi.size()) !=
        static_cast<long long>(p.config.r()) * p.config.n())
        throw CompatibilityError("psi must be r x n");
    for (double w : p.psi)
        if (!(w > 0)) throw PreconditionError("psi entries must be positive");
}

// Positive candidates a vote holds at one position: one for a proper entry,
// the two added candidates for an improper element.
int positive_candidate_at(const Vote& v, int j, std::mt19937_64& rng) {
    const Entry& e = v.at(j);
    if (!e.is_improper()) return e.plus();
    return std::uniform_int_distribution<int>(0, 1)(rng) ? e.plus2() : e.plus1();
}

std::vector<std::vector<std::vector<int>>> permutations_up_to(int d) {
    std::vector<std::vector<std::vector<int>>> all(d + 1);
    for (int k = 2; k <= d; ++k) {
        std::vector<int> p(k);
        std::iota(p.begin(), p.end(), 0);
        do all[k].push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
    }
    return all;
}

}  // namespace

void check_chain_config(const ChainConfig& cfg) {
    if (cfg.steps < 1) throw PreconditionError("chain needs at least one step");
    if (cfg.burn_in < 0 || cfg.burn_in >= cfg.steps)
        throw PreconditionError("burn-in must stay below the step count");
    if (cfg.thin < 1) throw PreconditionError("thinning interval must be positive");
}

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

ChainState make_chain(const Dataset& start, const ChainConfig& cfg) {
    check_chain_config(cfg);
    if (cfg.walk == WalkKind::ProperMoves) {
        check_proper(start, "the uniform walk");
    } else if (dataset_kind(start) == DatasetKind::Other) {
        throw PreconditionError("the extended walk starts proper or single-improper");
    }
    return ChainState{start, 0, std::mt19937_64(cfg.seed)};
}

ChainState& mh_uniform_step(ChainState& state, const ChainConfig& cfg) {
    if (cfg.walk != WalkKind::ProperMoves)
        throw PreconditionError("mh_uniform_step drives the ProperMoves walk");
    const Config& c = state.current.config;
    int degree = std::uniform_int_distribution<int>(2, 3)(state.rng);
    if (auto m = random_move(state.rng, c, degree)) {
        FiberElement x = to_fiber_element(state.current);
        if (auto y = apply_move(x, *m)) state.current = to_dataset(c, *y);
    }
    ++state.step;
    return state;
}

ChainState& extended_step(ChainState& state, const ChainConfig& cfg) {
    if (cfg.walk != WalkKind::ExtendedSwap)
        throw PreconditionError("extended_step drives the ExtendedSwap walk");
    const int N = state.current.size();
    const int n = state.current.config.n();
    const int r = state.current.config.r();
    if (N < 2) {
        ++state.step;
        return state;
    }
    int i1 = std::uniform_int_distribution<int>(0, N - 1)(state.rng);
    int i2 = std::uniform_int_distribution<int>(0, N - 2)(state.rng);
    if (i2 >= i1) ++i2;
    int j = std::uniform_int_distribution<int>(0, r - 1)(state.rng);
    // Vote one hands over a candidate it actually holds; vote two gives up an
    // arbitrary other candidate. Losing an unheld candidate is what creates an
    // improper element, so this reaches the extended states; the settle keeps
    // at most one improper vote and everything else is rejected as a hold.
    int cand1 = positive_candidate_at(state.current.votes[i1], j, state.rng);
    int cand2 = std::uniform_int_distribution<int>(0, n - 2)(state.rng);
    if (cand2 >= cand1) ++cand2;
    {
        try {
            auto result =
                swap_and_settle(state.current, SwapSpec{i1, i2, j, cand1, cand2}, &state.rng);
            state.current = std::move(result.dataset);
        } catch (const NotApplicableError&) {
            // proposal rejected: hold
        } catch (const NonterminationError&) {
            // no admissible settle: hold
        }
    }
    ++state.step;
    return state;
}

ChainState& chain_step(ChainState& state, const ChainConfig& cfg) {
    return cfg.walk == WalkKind::ProperMoves ? mh_uniform_step(state, cfg)
                                             : extended_step(state, cfg);
}

std::vector<Dataset> sample_chain(const Dataset& start, const ChainConfig& cfg) {
    ChainState state = make_chain(start, cfg);
    std::vector<Dataset> out;
    for (long long k = 1; k <= cfg.steps; ++k) {
        chain_step(state, cfg);
        if (k > cfg.burn_in && (k - cfg.burn_in) % cfg.thin == 0 &&
            dataset_kind(state.current) == DatasetKind::Proper)
            out.push_back(state.current);
    }
    return out;
}

std::map<Move, double> proposal_distribution(const Config& cfg) {
    auto votes = enumerate_votes(cfg);
    const long long S = static_cast<long long>(votes.size());
    const int n = cfg.n(), r = cfg.r();
    {
        double cost = 1;
        for (int i = 0; i < 3; ++i) cost *= static_cast<double>(S);
        for (int j = 0; j < r; ++j) cost *= 6;
        if (cost > 6e7) throw TooLargeError("proposal distribution too large to tabulate");
    }
    auto perms = permutations_up_to(3);
    std::map<Move, double> q;

    for (int d : {2, 3}) {
        const auto& taus = perms[d];
        const int nperm = static_cast<int>(taus.size());
        double weight = 0.5;  // degree mix
        for (long long t = 0; t < d; ++t) weight /= static_cast<double>(S);
        for (int j = 0; j < r; ++j) weight /= nperm;

        std::vector<int> pick(d, 0);   // ordered vote choices
        std::vector<int> shuffle(r, 0);  // per-position permutation index
        std::vector<std::vector<int>> w(d, std::vector<int>(r));
        auto votes_loop = [&](auto&& self, int i) -> void {
            if (i < d) {
                for (pick[i] = 0; pick[i] < S; ++pick[i]) self(self, i + 1);
                return;
            }
            auto shuffles_loop = [&](auto&& inner, int j) -> void {
                if (j < r) {
                    for (shuffle[j] = 0; shuffle[j] < nperm; ++shuffle[j]) inner(inner, j + 1);
                    return;
                }
                for (int a = 0; a < d; ++a)
                    for (int p = 0; p < r; ++p)
                        w[a][p] = votes[pick[taus[shuffle[p]][a]]].at(p).plus();
                for (const auto& vote : w) {  // collision check
                    for (int p1 = 0; p1 < r; ++p1)
                        for (int p2 = p1 + 1; p2 < r; ++p2)
                            if (vote[p1] == vote[p2]) return;
                }
                Move m;
                for (const auto& vote : w) ++m.z[Vote::of(vote)];
                for (int a = 0; a < d; ++a) --m.z[votes[pick[a]]];
                std::erase_if(m.z, [](const auto& kv) { return kv.second == 0; });
                if (!m.z.empty()) q[m] += weight;
            };
            shuffles_loop(shuffles_loop, 0);
        };
        votes_loop(votes_loop, 0);
    }
    (void)n;
    return q;
}

PValue estimate_pvalue(const Dataset& observed, const DatasetStatistic& statistic,
                       const ChainConfig& cfg) {
    check_chain_config(cfg);
    if (cfg.walk != WalkKind::ProperMoves)
        throw PreconditionError("p-values use the ProperMoves walk");
    check_proper(observed, "estimate_pvalue");
    const double obs = statistic(observed);

    ChainState state = make_chain(observed, cfg);
    std::vector<double> ind;
    for (long long k = 1; k <= cfg.steps; ++k) {
        mh_uniform_step(state, cfg);
        if (k > cfg.burn_in && (k - cfg.burn_in) % cfg.thin == 0)
            ind.push_back(statistic(state.current) >= obs ? 1.0 : 0.0);
    }
    if (ind.empty()) throw PreconditionError("no samples survive burn-in and thinning");

    const long long K = static_cast<long long>(ind.size());
    const double total = std::accumulate(ind.begin(), ind.end(), 0.0);
    PValue out;
    out.observed = obs;
    out.p = (1.0 + total) / (1.0 + static_cast<double>(K));

    const long long B = static_cast<long long>(std::sqrt(static_cast<double>(K)));
    if (B >= 2) {
        const long long m = K / B;
        std::vector<double> batch(B, 0.0);
        for (long long b = 0; b < B; ++b) {
            for (long long i = 0; i < m; ++i) batch[b] += ind[b * m + i];
            batch[b] /= static_cast<double>(m);
        }
        const double mean = std::accumulate(batch.begin(), batch.end(), 0.0) / B;
        double ss = 0;
        for (double v : batch) ss += (v - mean) * (v - mean);
        out.se = std::sqrt(ss / (static_cast<double>(B) * (B - 1)));
    }
    return out;
}

double chi_square_stat(const Dataset& d, const ModelParams& params) {
    check_proper(d, "chi_square_stat");
    check_params(params);
    if (d.config != params.config) throw CompatibilityError("dataset and params disagree");
    if (params.config.num_votes() > 2'000'000)
        throw TooLargeError("chi-square enumerates every vote");

    auto votes = enumerate_votes(params.config);
    std::vector<long long> count(votes.size(), 0);
    for (const auto& v : d.votes) ++count[vote_index(params.config, v)];

    const double N = static_cast<double>(d.size());
    double stat = 0;
    for (size_t i = 0; i < votes.size(); ++i) {
        double expected = N * vote_probability(params.config, params.psi, votes[i]);
        double delta = static_cast<double>(count[i]) - expected;
        stat += delta * delta / expected;
    }
    return stat;
}

double log_likelihood(const Dataset& d, const ModelParams& params) {
    check_proper(d, "log_likelihood");
    check_params(params);
    if (d.config != params.config) throw CompatibilityError("dataset and params disagree");
    const int n = params.config.n(), r = params.config.r();
    SuffStat t = suff_stat(d);
    double ll = 0;
    for (int j = 0; j < r; ++j)
        for (int k = 0; k < n; ++k)
            if (t.at(j, k) != 0)
                ll += t.at(j, k) * std::log(params.psi[static_cast<size_t>(j) * n + k]);
    return ll - d.size() * std::log(compute_Z(params.config, params.psi));
}

Weights log_likelihood_gradient(const Dataset& d, const ModelParams& params) {
    check_proper(d, "log_likelihood_gradient");
    check_params(params);
    if (d.config != params.config) throw CompatibilityError("dataset and params disagree");
    const int n = params.config.n(), r = params.config.r();
    SuffStat t = suff_stat(d);
    auto marg = position_marginals(params.config, params.psi);
    Weights g(static_cast<size_t>(r) * n);
    for (size_t i = 0; i < g.size(); ++i) g[i] = t.t[i] - d.size() * marg[i];
    return g;
}

ModelParams fit_mle(const Dataset& data, const FitConfig& config, double tol) {
    check_proper(data, "fit_mle");
    if (!(tol > 0)) throw PreconditionError("tolerance must be positive");
    if (data.size() < 1) throw PreconditionError("fit needs at least one vote");
    if (config.max_iters < 1 || !(config.floor > 0))
        throw PreconditionError("fit config needs positive budget and floor");

    const Config& cfg = data.config;
    const int n = cfg.n(), r = cfg.r(), N = data.size();
    SuffStat t = suff_stat(data);

    ModelParams params{cfg, Weights(static_cast<size_t>(r) * n, 1.0 / n)};
    double ll = log_likelihood(data, params);
    double step = 1.0 / N;

    for (int iter = 0; iter < config.max_iters; ++iter) {
        auto marg = position_marginals(cfg, params.psi);
        double gmax = 0, g2 = 0;
        Weights g(params.psi.size());
        for (size_t i = 0; i < g.size(); ++i) {
            g[i] = t.t[i] - N * marg[i];
            gmax = std::max(gmax, std::abs(g[i]));
            g2 += g[i] * g[i];
        }
        if (gmax <= tol) return params;

        // Backtracking ascent in log-weights; the normalized row gauge and
        // the positivity floor are reapplied to every candidate.
        bool moved = false;
        while (step >= 1e-18) {
            ModelParams cand{cfg, Weights(params.psi.size())};
            for (int j = 0; j < r; ++j) {
                double row = 0;
                for (int k = 0; k < n; ++k) {
                    size_t i = static_cast<size_t>(j) * n + k;
                    cand.psi[i] = params.psi[i] * std::exp(step * g[i]);
                    row += cand.psi[i];
                }
                for (int k = 0; k < n; ++k) {
                    size_t i = static_cast<size_t>(j) * n + k;
                    cand.psi[i] = std::max(config.floor, cand.psi[i] / row);
                }
            }
            double cll = log_likelihood(data, cand);
            if (cll >= ll + 1e-4 * step * g2) {
                params = std::move(cand);
                ll = cll;
                step *= 2;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) throw NonconvergenceError("mle line search stalled");
    }
    throw NonconvergenceError("mle did not reach tolerance within the budget");
}

}  // namespace birkhoff
