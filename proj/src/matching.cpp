#include "hemidef/matching.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace hemidef {

std::vector<std::pair<int, int>> strong_edges(const PayoffMatrix& P) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < P.n_def; ++i)
        for (int j = 0; j < P.n_int; ++j)
            if (P.has(i, j) && P.at(i, j) < 0.0) edges.emplace_back(i, j);
    return edges;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unit-capacity min-cost flow, successive shortest augmenting paths (SPFA).
// Costs are payoffs shifted by a constant to make every edge positive; the
// shift contributes the same amount per assigned pair, so within each
// cardinality the minimizer is unchanged, and augmenting while any path
// exists maximizes cardinality first.
struct FlowGraph {
    struct Edge {
        int to;
        int cap;
        double cost;
        int rev;
    };
    std::vector<std::vector<Edge>> g;

    explicit FlowGraph(int n) : g(n) {}

    void add(int u, int v, int cap, double cost) {
        g[u].push_back({v, cap, cost, static_cast<int>(g[v].size())});
        g[v].push_back({u, 0, -cost, static_cast<int>(g[u].size()) - 1});
    }

    // Augments one unit along a cheapest source->sink path; false when none.
    bool augment(int s, int t) {
        const int n = static_cast<int>(g.size());
        std::vector<double> dist(n, kInf);
        std::vector<int> pv(n, -1), pe(n, -1);
        std::vector<std::uint8_t> inq(n, 0);
        std::deque<int> q;
        dist[s] = 0.0;
        q.push_back(s);
        inq[s] = 1;
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            inq[u] = 0;
            for (int k = 0; k < static_cast<int>(g[u].size()); ++k) {
                const Edge& e = g[u][k];
                if (e.cap <= 0 || dist[u] + e.cost >= dist[e.to]) continue;
                dist[e.to] = dist[u] + e.cost;
                pv[e.to] = u;
                pe[e.to] = k;
                if (!inq[e.to]) {
                    q.push_back(e.to);
                    inq[e.to] = 1;
                }
            }
        }
        if (pv[t] < 0) return false;
        for (int v = t; v != s; v = pv[v]) {
            Edge& e = g[pv[v]][pe[v]];
            e.cap -= 1;
            g[v][e.rev].cap += 1;
        }
        return true;
    }
};

struct Outcome {
    int count = 0;
    double value = 0.0;
    std::vector<int> assignment;
};

// Max-cardinality min-cost matching over strong edges, optionally excluding
// some defenders/intruders.
Outcome solve_restricted(const PayoffMatrix& P, const std::vector<std::uint8_t>& skip_def,
                         const std::vector<std::uint8_t>& skip_int) {
    double max_abs = 0.0;
    for (int i = 0; i < P.n_def; ++i)
        for (int j = 0; j < P.n_int; ++j)
            if (P.has(i, j) && P.at(i, j) < 0.0) max_abs = std::max(max_abs, -P.at(i, j));
    const double shift = max_abs + 1.0;

    const int s = 0, t = P.n_def + P.n_int + 1;
    FlowGraph fg(t + 1);
    for (int i = 0; i < P.n_def; ++i)
        if (!skip_def[i]) fg.add(s, 1 + i, 1, 0.0);
    for (int j = 0; j < P.n_int; ++j)
        if (!skip_int[j]) fg.add(1 + P.n_def + j, t, 1, 0.0);
    for (int i = 0; i < P.n_def; ++i) {
        if (skip_def[i]) continue;
        for (int j = 0; j < P.n_int; ++j)
            if (!skip_int[j] && P.has(i, j) && P.at(i, j) < 0.0)
                fg.add(1 + i, 1 + P.n_def + j, 1, P.at(i, j) + shift);
    }

    while (fg.augment(s, t)) {
    }

    Outcome o;
    o.assignment.assign(P.n_def, -1);
    for (int i = 0; i < P.n_def; ++i) {
        if (skip_def[i]) continue;
        for (const auto& e : fg.g[1 + i]) {
            if (e.to == s || e.cap != 0) continue;  // saturated forward edge
            const int j = e.to - 1 - P.n_def;
            if (j >= 0 && j < P.n_int) {
                o.assignment[i] = j;
                ++o.count;
                o.value += P.at(i, j);
            }
        }
    }
    return o;
}

} // namespace

MatchingResult expert_matching(const PayoffMatrix& P) {
    MatchingResult res;
    res.assignment.assign(P.n_def, -1);
    if (P.n_def == 0 || P.n_int == 0) return res;

    std::vector<std::uint8_t> skip_def(P.n_def, 0), skip_int(P.n_int, 0);
    const Outcome target = solve_restricted(P, skip_def, skip_int);
    if (target.count == 0) return res;

    const double tol = 1e-9 * (1.0 + std::abs(target.value));

    // Lexicographic refinement: fix defenders in index order to the smallest
    // intruder (unassigned last) that still admits a completion reaching the
    // optimal cardinality and value.
    int fixed_count = 0;
    double fixed_value = 0.0;
    for (int i = 0; i < P.n_def; ++i) {
        std::vector<int> candidates;
        for (int j = 0; j < P.n_int; ++j)
            if (!skip_int[j] && P.has(i, j) && P.at(i, j) < 0.0) candidates.push_back(j);
        candidates.push_back(-1);  // unassigned sorts after every index

        skip_def[i] = 1;
        for (int j : candidates) {
            const int try_count = fixed_count + (j >= 0 ? 1 : 0);
            const double try_value = fixed_value + (j >= 0 ? P.at(i, j) : 0.0);
            if (j >= 0) skip_int[j] = 1;

            const Outcome rest = solve_restricted(P, skip_def, skip_int);
            if (try_count + rest.count == target.count &&
                std::abs(try_value + rest.value - target.value) <= tol) {
                res.assignment[i] = j;
                fixed_count = try_count;
                fixed_value = try_value;
                break;
            }
            if (j >= 0) skip_int[j] = 0;
        }
    }

    res.strong_count = fixed_count;
    res.value = fixed_value;
    return res;
}

namespace {

struct BruteState {
    const PayoffMatrix* P;
    std::vector<int> current;
    std::vector<std::uint8_t> used;
    std::vector<int> best;
    int best_count = -1;
    double best_value = 0.0;

    static bool lex_smaller(const std::vector<int>& a, const std::vector<int>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const unsigned ka = a[i] < 0 ? ~0u : static_cast<unsigned>(a[i]);
            const unsigned kb = b[i] < 0 ? ~0u : static_cast<unsigned>(b[i]);
            if (ka != kb) return ka < kb;
        }
        return false;
    }

    void consider(int count, double value) {
        bool better = false;
        if (count > best_count) better = true;
        else if (count == best_count) {
            if (value < best_value - 1e-12) better = true;
            else if (value <= best_value + 1e-12 && lex_smaller(current, best)) better = true;
        }
        if (better) {
            best = current;
            best_count = count;
            best_value = value;
        }
    }

    void dfs(int i, int count, double value) {
        if (i == P->n_def) {
            consider(count, value);
            return;
        }
        for (int j = 0; j < P->n_int; ++j) {
            if (used[j] || !P->has(i, j) || P->at(i, j) >= 0.0) continue;
            used[j] = 1;
            current[i] = j;
            dfs(i + 1, count + 1, value + P->at(i, j));
            current[i] = -1;
            used[j] = 0;
        }
        dfs(i + 1, count, value);  // leave defender i unassigned
    }
};

} // namespace

MatchingResult brute_force_matching(const PayoffMatrix& P) {
    if (P.n_def > 8 || P.n_int > 8)
        throw std::invalid_argument("brute_force_matching: refuses matrices larger than 8x8");
    BruteState st;
    st.P = &P;
    st.current.assign(P.n_def, -1);
    st.used.assign(P.n_int, 0);
    st.best.assign(P.n_def, -1);
    st.dfs(0, 0, 0.0);

    MatchingResult res;
    res.assignment = st.best;
    res.strong_count = std::max(st.best_count, 0);
    res.value = st.best_count > 0 ? st.best_value : 0.0;
    return res;
}

} // namespace hemidef
