#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace hemidef {

// Payoff table over defender x intruder pairs. Entries may be absent
// (pair not sensible); absent entries are excluded edges, never sentinels.
struct PayoffMatrix {
    int n_def = 0;
    int n_int = 0;
    std::vector<double> p;
    std::vector<std::uint8_t> present;

    PayoffMatrix() = default;
    PayoffMatrix(int nd, int ni)
        : n_def(nd), n_int(ni), p(static_cast<std::size_t>(nd) * ni, 0.0),
          present(static_cast<std::size_t>(nd) * ni, 0) {}

    double at(int i, int j) const { return p[static_cast<std::size_t>(i) * n_int + j]; }
    bool has(int i, int j) const { return present[static_cast<std::size_t>(i) * n_int + j] != 0; }
    void set(int i, int j, double v) {
        p[static_cast<std::size_t>(i) * n_int + j] = v;
        present[static_cast<std::size_t>(i) * n_int + j] = 1;
    }
    void clear(int i, int j) { present[static_cast<std::size_t>(i) * n_int + j] = 0; }
};

// Injective defender -> intruder assignment over strong pairs (payoff < 0).
// value is the sum of assigned payoffs, minimized among maximum-cardinality
// matchings; ties broken by the lexicographically smallest assignment
// sequence (unassigned sorts after any intruder index).
struct MatchingResult {
    std::vector<int> assignment;  // intruder index per defender, -1 when unassigned
    int strong_count = 0;
    double value = 0.0;
};

// All present entries with negative payoff, row-major order.
std::vector<std::pair<int, int>> strong_edges(const PayoffMatrix& P);

// Maximum-cardinality matching on strong edges, minimum total payoff among
// those, deterministic lexicographic tie-break.
MatchingResult expert_matching(const PayoffMatrix& P);

// Exhaustive oracle with the identical optimality criterion and tie-break.
// Refuses matrices larger than 8x8.
MatchingResult brute_force_matching(const PayoffMatrix& P);

} // namespace hemidef
