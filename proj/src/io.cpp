#include "birkhoff/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace birkhoff {

namespace {

int parse_candidate(const std::string& s, int n) {
    size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("bad candidate '" + s + "'");
    }
    if (pos != s.size()) throw ParseError("bad candidate '" + s + "'");
    if (v < 1 || v > n) throw ParseError("candidate " + s + " outside 1.." + std::to_string(n));
    return v - 1;
}

}  // namespace

std::string format_entry(const Entry& e) {
    if (!e.is_improper()) return std::to_string(e.plus() + 1);
    return std::to_string(e.plus1() + 1) + "+" + std::to_string(e.plus2() + 1) + "-" +
           std::to_string(e.minus() + 1);
}

Entry parse_entry(const std::string& token, int n) {
    size_t plus = token.find('+');
    if (plus == std::string::npos) return Entry::proper(parse_candidate(token, n));
    size_t minus = token.find('-', plus + 1);
    if (minus == std::string::npos) throw ParseError("bad entry '" + token + "'");
    int p1 = parse_candidate(token.substr(0, plus), n);
    int p2 = parse_candidate(token.substr(plus + 1, minus - plus - 1), n);
    int m = parse_candidate(token.substr(minus + 1), n);
    try {
        return Entry::improper(p1, p2, m);
    } catch (const PreconditionError& e) {
        throw ParseError("bad entry '" + token + "': " + e.what());
    }
}

Dataset parse_dataset(const std::string& text, int n) {
    std::istringstream in(text);
    std::string line;
    std::vector<Vote> votes;
    int r = -1;
    while (std::getline(in, line)) {
        if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<Entry> es;
        std::string token;
        while (ls >> token) es.push_back(parse_entry(token, n));
        if (es.empty()) continue;
        if (r < 0) r = static_cast<int>(es.size());
        else if (r != static_cast<int>(es.size()))
            throw CompatibilityError("votes of different lengths in one dataset");
        votes.push_back(Vote(std::move(es)));
    }
    if (votes.empty()) throw ParseError("dataset has no votes");
    return Dataset{Config(n, r), std::move(votes)};
}

std::string format_dataset(const Dataset& d) {
    std::string out;
    for (const auto& v : d.votes) {
        for (int j = 0; j < v.size(); ++j) {
            if (j) out += ' ';
            out += format_entry(v.at(j));
        }
        out += '\n';
    }
    return out;
}

std::string vote_tuple(const Vote& v) {
    std::string out = "(";
    for (int j = 0; j < v.size(); ++j) {
        const Entry& e = v.at(j);
        if (e.is_improper()) throw PreconditionError("vote tuples require proper votes");
        if (j) out += ',';
        out += std::to_string(e.plus() + 1);
    }
    return out + ")";
}

Vote parse_vote_tuple(const std::string& s, int n) {
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
        throw ParseError("bad vote tuple '" + s + "'");
    std::vector<int> cands;
    std::string body = s.substr(1, s.size() - 2);
    size_t start = 0;
    while (true) {
        size_t comma = body.find(',', start);
        std::string tok =
            comma == std::string::npos ? body.substr(start) : body.substr(start, comma - start);
        cands.push_back(parse_candidate(tok, n));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return Vote::of(cands);
}

std::string suff_stat_to_json(const SuffStat& s) {
    nlohmann::json j;
    j["n"] = s.n;
    j["r"] = s.r;
    j["N"] = s.N;
    nlohmann::json rows = nlohmann::json::array();
    for (int p = 0; p < s.r; ++p) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < s.n; ++k) row.push_back(s.at(p, k));
        rows.push_back(std::move(row));
    }
    j["t"] = std::move(rows);
    return j.dump(2) + "\n";
}

SuffStat suff_stat_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad sufficient statistic JSON: ") + e.what());
    }
    SuffStat s;
    try {
        s.n = j.at("n").get<int>();
        s.r = j.at("r").get<int>();
        s.N = j.at("N").get<int>();
        const auto& rows = j.at("t");
        if (!rows.is_array() || static_cast<int>(rows.size()) != s.r)
            throw ParseError("t must have r rows");
        for (const auto& row : rows) {
            if (!row.is_array() || static_cast<int>(row.size()) != s.n)
                throw ParseError("t rows must have n entries");
            for (const auto& c : row) s.t.push_back(c.get<int>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad sufficient statistic JSON: ") + e.what());
    }
    if (s.n < 1 || s.r < 1 || s.r > s.n || s.N < 0)
        throw ParseError("bad sufficient statistic dimensions");
    return s;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("cannot write " + tmp);
        out << content;
        out.flush();
        if (!out) throw DomainError("failed writing " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DomainError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

}  // namespace birkhoff
