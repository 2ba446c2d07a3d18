#pragma once

#include <optional>
#include <string>
#include <vector>

#include "birkhoff/fiber.hpp"

namespace birkhoff {

// One published minimal-basis count: moves of the given degree for (n, r).
struct BasisCountRow {
    int r = 0;
    int n = 0;
    int degree = 0;
    long long count = 0;

    friend auto operator<=>(const BasisCountRow&, const BasisCountRow&) = default;
};

// The published move counts for r = 2..5, n = 1..10, degrees 2 and 3,
// sorted by (r, n, degree).
const std::vector<BasisCountRow>& published_basis_counts();

// Lookup into the published counts; empty outside the tabulated range.
std::optional<long long> published_basis_count(int r, int n, int degree);

// The published three-vote class sizes by (r, n_M, N_M) for r = 1..4.
const std::vector<ClassSizeRow>& published_class_sizes();

// Every published row serialized as one JSON document; data/tables.json in
// the repository holds exactly this text.
std::string tables_json();

}  // namespace birkhoff
