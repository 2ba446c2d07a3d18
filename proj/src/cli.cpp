#include "birkhoff/cli.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "birkhoff/basis.hpp"
#include "birkhoff/connector.hpp"
#include "birkhoff/errors.hpp"
#include "birkhoff/fiber.hpp"
#include "birkhoff/io.hpp"
#include "birkhoff/model.hpp"
#include "birkhoff/sampler.hpp"
#include "birkhoff/tables.hpp"

namespace birkhoff {

namespace {

std::string slurp(const std::string& path) {
    if (path == "-")
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    return read_text_file(path);
}

Dataset load_dataset(const std::string& path, int n, int r) {
    Dataset d = parse_dataset(slurp(path), n);
    if (r > 0 && !d.votes.empty() && d.config.r() != r)
        throw CompatibilityError("dataset has " + std::to_string(d.config.r()) +
                                 " positions, expected " + std::to_string(r));
    return d;
}

std::string format_vote_line(const Vote& v) {
    std::string line;
    for (int j = 0; j < v.size(); ++j) {
        if (j) line += ' ';
        line += format_entry(v.at(j));
    }
    return line;
}

std::string cmd_votes(int n, int r) {
    std::string out;
    for (const auto& v : enumerate_votes(Config(n, r))) out += format_vote_line(v) + "\n";
    return out;
}

std::string cmd_matrix(int n, int r) {
    IntMatrix m = config_matrix(Config(n, r));
    std::string out;
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) {
            if (j) out += ' ';
            out += std::to_string(m.at(i, j));
        }
        out += '\n';
    }
    return out;
}

std::string cmd_fiber(const std::string& stat_file, int graph_degree) {
    SuffStat t = suff_stat_from_json(slurp(stat_file));
    auto fiber = enumerate_fiber(t);
    std::string out;
    for (const auto& x : fiber) {
        bool first = true;
        for (const auto& [v, c] : x) {
            if (!first) out += ' ';
            first = false;
            out += vote_tuple(v) + ":" + std::to_string(c);
        }
        out += '\n';
    }
    FiberGraph g = fiber_graph(fiber, graph_degree);
    nlohmann::json summary{{"elements", fiber.size()},
                           {"degree", graph_degree},
                           {"components", g.component_count}};
    out += summary.dump() + "\n";
    return out;
}

std::string cmd_count(int n, int r, int degree, bool formula) {
    long long value = formula ? count_formula(r, degree).evaluate(n)
                              : minimal_basis_counts(n, r, degree);
    return std::to_string(value) + "\n";
}

struct VerifyOutcome {
    std::string report;
    bool all_pass = true;
};

VerifyOutcome cmd_verify_tables(const std::vector<int>& r_set, int max_n, bool with_formula,
                                bool with_brute, int jobs) {
    struct Row {
        int r = 0, n = 0, degree = 0;
        long long embedded = 0;
        long long brute = 0;
        bool skipped = false;
        std::string error;
    };
    std::vector<Row> rows;
    for (int r : r_set)
        for (int n = 1; n <= std::min(max_n, 10); ++n)
            for (int degree : {2, 3}) {
                Row row;
                row.r = r;
                row.n = n;
                row.degree = degree;
                row.embedded = *published_basis_count(r, n, degree);
                rows.push_back(std::move(row));
            }

    if (with_brute) {
        std::atomic<size_t> next{0};
        auto worker = [&rows, &next] {
            for (size_t i; (i = next.fetch_add(1)) < rows.size();) {
                try {
                    rows[i].brute = minimal_basis_counts(rows[i].n, rows[i].r, rows[i].degree);
                } catch (const TooLargeError&) {
                    rows[i].skipped = true;
                } catch (const std::exception& e) {
                    rows[i].error = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < std::min<int>(jobs, static_cast<int>(rows.size())); ++t)
            pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
        for (const auto& row : rows)
            if (!row.error.empty()) throw PreconditionError(row.error);
    }

    VerifyOutcome outcome;
    std::ostringstream os;
    for (const auto& row : rows) {
        os << "r=" << row.r << " n=" << row.n << " degree=" << row.degree
           << " embedded=" << row.embedded;
        bool pass = true;
        if (with_formula) {
            long long f = count_formula(row.r, row.degree).evaluate(row.n);
            os << " formula=" << f;
            pass = pass && f == row.embedded;
        }
        if (with_brute) {
            if (row.skipped) {
                os << " brute=SKIPPED";
            } else {
                os << " brute=" << row.brute;
                pass = pass && row.brute == row.embedded;
            }
        }
        os << (pass ? " PASS" : " FAIL") << "\n";
        outcome.all_pass = outcome.all_pass && pass;
    }
    outcome.report = os.str();
    return outcome;
}

std::string cmd_sample(const Dataset& start, const ChainConfig& cfg) {
    auto samples = sample_chain(start, cfg);
    std::string out;
    for (size_t k = 0; k < samples.size(); ++k)
        out += "# sample " + std::to_string(k + 1) + "\n" + format_dataset(samples[k]);
    return out;
}

std::string cmd_test(const Dataset& observed, const ChainConfig& cfg) {
    ModelParams uniform{observed.config,
                        Weights(static_cast<size_t>(observed.config.r()) * observed.config.n(),
                                1.0 / observed.config.n())};
    auto stat = [&uniform](const Dataset& d) { return chi_square_stat(d, uniform); };
    PValue res = estimate_pvalue(observed, stat, cfg);
    nlohmann::json doc{{"p", res.p}, {"se", res.se}, {"statistic_observed", res.observed}};
    return doc.dump() + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Swap calculus, Markov bases, and fiber samplers of the Birkhoff ranking model"};
    app.require_subcommand(1);

    int n = 0, r = 0, degree = 2, graph_degree = 2, max_n = 7, jobs = 1;
    long long steps = 0, burn_in = 0, thin = 1;
    std::uint64_t seed = 0;
    bool formula = false, brute = false;
    std::string data_file, stat_file, out_file, walk = "proper";
    std::string from_file, to_file;

    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", out_file, "write output to FILE"); };
    auto add_nr = [&](CLI::App* cmd, bool need_r) {
        cmd->add_option("--n", n, "number of candidates")->required()->check(CLI::PositiveNumber);
        auto* opt = cmd->add_option("--r", r, "number of positions")->check(CLI::PositiveNumber);
        if (need_r) opt->required();
    };

    auto* votes = app.add_subcommand("votes", "list every vote of the (n,r) model");
    add_nr(votes, true);
    add_out(votes);

    auto* matrix = app.add_subcommand("matrix", "print the position by candidate design matrix");
    add_nr(matrix, true);
    add_out(matrix);

    auto* stat = app.add_subcommand("stat", "sufficient statistic of a dataset as JSON");
    add_nr(stat, false);
    stat->add_option("--data", data_file, "dataset file, - for standard input");
    stat->add_option("file", data_file, "dataset file, - for standard input");
    add_out(stat);

    auto* fiber = app.add_subcommand("fiber", "enumerate the fiber of a sufficient statistic");
    fiber->add_option("--stat", stat_file, "sufficient statistic JSON file, - for standard input")
        ->required();
    fiber->add_option("--graph-degree", graph_degree, "move degree bound of the fiber graph")
        ->check(CLI::IsMember({2, 3}));
    add_out(fiber);

    auto* basis = app.add_subcommand("basis", "enumerate a minimal Markov basis");
    add_nr(basis, true);
    basis->add_option("--max-degree", degree, "largest move degree")->check(CLI::IsMember({2, 3}))
        ->default_val(3);
    add_out(basis);

    auto* count = app.add_subcommand("count", "count minimal basis moves of one degree");
    add_nr(count, true);
    count->add_option("--degree", degree, "move degree")->required()->check(CLI::IsMember({2, 3}));
    count->add_flag("--formula", formula, "evaluate the closed form");
    count->add_flag("--brute", brute, "recount by fiber enumeration");
    add_out(count);

    auto* verify = app.add_subcommand("verify-tables", "check the published move counts");
    verify->add_option("--r", r, "restrict to one r")->check(CLI::IsMember({2, 3, 4, 5}));
    verify->add_option("--max-n", max_n, "largest n to check")->check(CLI::PositiveNumber);
    verify->add_flag("--formula", formula, "check the closed forms only");
    verify->add_flag("--brute", brute, "check the brute force recount only");
    verify->add_option("--jobs", jobs, "parallel brute force recounts")
        ->check(CLI::PositiveNumber);
    add_out(verify);

    auto* connect_cmd = app.add_subcommand("connect", "degree three path between two datasets");
    add_nr(connect_cmd, false);
    connect_cmd->add_option("from", from_file, "dataset file")->required();
    connect_cmd->add_option("to", to_file, "dataset file")->required();
    add_out(connect_cmd);

    auto* sample = app.add_subcommand("sample", "run a fiber walk and stream sampled datasets");
    add_nr(sample, false);
    sample->add_option("--data", data_file, "starting dataset file, - for standard input")
        ->required();
    sample->add_option("--walk", walk, "proper or extended")
        ->check(CLI::IsMember({"proper", "extended"}));
    sample->add_option("--steps", steps, "chain length")->required()->check(CLI::PositiveNumber);
    sample->add_option("--burn-in", burn_in, "steps discarded before emitting");
    sample->add_option("--emit-every", thin, "thinning interval")->check(CLI::PositiveNumber);
    sample->add_option("--seed", seed, "random seed");
    add_out(sample);

    auto* test = app.add_subcommand("test", "exact conditional goodness of fit p-value");
    add_nr(test, false);
    test->add_option("--data", data_file, "observed dataset file, - for standard input")
        ->required();
    test->add_option("--steps", steps, "chain length")->required()->check(CLI::PositiveNumber);
    test->add_option("--burn-in", burn_in, "steps discarded before sampling");
    test->add_option("--thin", thin, "thinning interval")->check(CLI::PositiveNumber);
    test->add_option("--seed", seed, "random seed");
    add_out(test);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        std::string output;
        int code = 0;
        if (votes->parsed()) {
            output = cmd_votes(n, r);
        } else if (matrix->parsed()) {
            output = cmd_matrix(n, r);
        } else if (stat->parsed()) {
            if (data_file.empty()) {
                err << "stat needs a dataset file (--data or positional)\n";
                return 2;
            }
            output = suff_stat_to_json(suff_stat(load_dataset(data_file, n, r))) + "\n";
        } else if (fiber->parsed()) {
            output = cmd_fiber(stat_file, graph_degree);
        } else if (basis->parsed()) {
            output = format_basis(enumerate_basis_moves(n, r, degree));
        } else if (count->parsed()) {
            if (formula == brute) {
                err << "count needs exactly one of --formula and --brute\n";
                return 2;
            }
            output = cmd_count(n, r, degree, formula);
        } else if (verify->parsed()) {
            if (formula && brute) {
                err << "pass at most one of --formula and --brute\n";
                return 2;
            }
            std::vector<int> r_set = r > 0 ? std::vector<int>{r} : std::vector<int>{2, 3, 4, 5};
            VerifyOutcome o = cmd_verify_tables(r_set, max_n, !brute, !formula, jobs);
            output = o.report;
            code = o.all_pass ? 0 : 1;
        } else if (connect_cmd->parsed()) {
            ConnectionPath path =
                connect(load_dataset(from_file, n, r), load_dataset(to_file, n, r));
            output = path_to_json(path) + "\n";
        } else if (sample->parsed() || test->parsed()) {
            Dataset d = load_dataset(data_file, n, r);
            ChainConfig cfg{steps, burn_in, thin, seed,
                            walk == "extended" ? WalkKind::ExtendedSwap : WalkKind::ProperMoves};
            output = sample->parsed() ? cmd_sample(d, cfg) : cmd_test(d, cfg);
        }

        if (!out_file.empty())
            write_text_file(out_file, output);
        else
            out << output;
        return code;
    } catch (const DomainError& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

}  // namespace birkhoff
