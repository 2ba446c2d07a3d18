#include "birkhoff/tables.hpp"

#include <algorithm>
#include <array>

#include "json.hpp"

namespace birkhoff {

namespace {

// Move counts by degree and r, indexed by n = 1..10.
constexpr std::array<std::array<long long, 10>, 4> kDegree2{{
    {0, 0, 0, 6, 30, 90, 210, 420, 756, 1260},                        // r = 2
    {0, 0, 0, 18, 360, 2160, 8190, 23940, 58968, 128520},             // r = 3
    {0, 0, 0, 18, 1050, 16650, 125370, 611940, 2262708, 6898500},     // r = 4
    {0, 0, 0, 0, 1050, 46350, 787500, 7505400, 46928700, 218276100},  // r = 5
}};

constexpr std::array<std::array<long long, 10>, 4> kDegree3{{
    {0, 0, 1, 4, 10, 20, 35, 56, 84, 120},
    {0, 0, 1, 160, 1000, 3680, 10325, 24416, 51240, 98400},
    {0, 0, 0, 160, 28840, 257300, 1303540, 4884880, 15046080, 40267080},
    {0, 0, 0, 0, 28840, 7056240, 84797440, 565736640, 2735910240, 10678207680},
}};

std::vector<BasisCountRow> make_basis_counts() {
    std::vector<BasisCountRow> rows;
    for (int r = 2; r <= 5; ++r)
        for (int n = 1; n <= 10; ++n) {
            rows.push_back({r, n, 2, kDegree2[r - 2][n - 1]});
            rows.push_back({r, n, 3, kDegree3[r - 2][n - 1]});
        }
    return rows;
}

std::vector<ClassSizeRow> make_class_sizes() {
    return {
        {1, 1, 1, 1},      {1, 2, 1, 2},      {1, 3, 1, 1},

        {2, 2, 1, 2},      {2, 3, 1, 30},     {2, 3, 2, 1},      {2, 4, 1, 60},
        {2, 5, 1, 30},

        {3, 3, 1, 30},     {3, 3, 2, 1},      {3, 4, 1, 1128},   {3, 4, 2, 144},
        {3, 5, 1, 5760},   {3, 5, 2, 150},    {3, 6, 1, 8820},   {3, 7, 1, 4410},

        {4, 4, 1, 1128},   {4, 4, 2, 144},    {4, 5, 1, 82080},  {4, 5, 2, 23040},
        {4, 5, 4, 600},    {4, 6, 1, 885240}, {4, 6, 2, 60480},  {4, 7, 1, 2847600},
        {4, 7, 2, 37800},  {4, 8, 1, 3749760}, {4, 9, 1, 1814400},
    };
}

}  // namespace

const std::vector<BasisCountRow>& published_basis_counts() {
    static const std::vector<BasisCountRow> rows = make_basis_counts();
    return rows;
}

std::optional<long long> published_basis_count(int r, int n, int degree) {
    if (r < 2 || r > 5 || n < 1 || n > 10) return std::nullopt;
    if (degree == 2) return kDegree2[r - 2][n - 1];
    if (degree == 3) return kDegree3[r - 2][n - 1];
    return std::nullopt;
}

const std::vector<ClassSizeRow>& published_class_sizes() {
    static const std::vector<ClassSizeRow> rows = make_class_sizes();
    return rows;
}

std::string tables_json() {
    nlohmann::json doc;
    auto& counts = doc["basis_counts"] = nlohmann::json::array();
    for (const auto& row : published_basis_counts())
        counts.push_back({{"r", row.r}, {"n", row.n}, {"degree", row.degree},
                          {"count", row.count}});
    auto& sizes = doc["class_sizes"] = nlohmann::json::array();
    for (const auto& row : published_class_sizes())
        sizes.push_back({{"r", row.r}, {"n_M", row.n_M}, {"N_M", row.N_M},
                         {"size", row.size}});
    return doc.dump(2) + "\n";
}

}  // namespace birkhoff
