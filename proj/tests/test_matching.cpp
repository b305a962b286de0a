#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hemidef/matching.hpp"
#include "hemidef/rng.hpp"

using namespace hemidef;

namespace {

PayoffMatrix from_rows(const std::vector<std::vector<double>>& rows,
                       const std::vector<std::vector<int>>& absent = {}) {
    const int nd = static_cast<int>(rows.size());
    const int ni = nd ? static_cast<int>(rows[0].size()) : 0;
    PayoffMatrix P(nd, ni);
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < ni; ++j) P.set(i, j, rows[i][j]);
    for (const auto& a : absent) P.clear(a[0], a[1]);
    return P;
}

PayoffMatrix random_matrix(Rng& rng, int nd, int ni, double absent_frac = 0.2) {
    PayoffMatrix P(nd, ni);
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < ni; ++j)
            if (uniform01(rng) >= absent_frac)
                P.set(i, j, uniform_range(rng, -1.0, 1.0));
    return P;
}

} // namespace

TEST_CASE("strong_edges filters by presence and sign") {
    CHECK(strong_edges(from_rows({{0.5, 1.0}, {2.0, 0.1}})).empty());
    const auto one = strong_edges(from_rows({{-0.5}}));
    REQUIRE(one.size() == 1);
    CHECK(one[0] == std::pair<int, int>{0, 0});

    const auto two = strong_edges(from_rows({{-1.0, 2.0}, {-9.0, -3.0}}, {{1, 0}}));
    REQUIRE(two.size() == 2);
    CHECK(two[0] == std::pair<int, int>{0, 0});
    CHECK(two[1] == std::pair<int, int>{1, 1});
}

TEST_CASE("expert_matching picks the cardinality-first cross assignment") {
    // {(0,0),(1,1)} would strand defender 1 on a positive edge; the cross
    // assignment strongly matches both
    const MatchingResult m = expert_matching(from_rows({{-1.0, -2.0}, {-3.0, 1.0}}));
    CHECK(m.strong_count == 2);
    CHECK(m.assignment == std::vector<int>{1, 0});
    CHECK(m.value == doctest::Approx(-5.0));
}

TEST_CASE("expert_matching trivial cases") {
    const MatchingResult empty = expert_matching(from_rows({{0.5}}));
    CHECK(empty.strong_count == 0);
    CHECK(empty.assignment == std::vector<int>{-1});
    CHECK(empty.value == 0.0);

    const MatchingResult one = expert_matching(from_rows({{-1.0}}));
    CHECK(one.strong_count == 1);
    CHECK(one.assignment == std::vector<int>{0});
    CHECK(one.value == doctest::Approx(-1.0));

    const MatchingResult none = expert_matching(PayoffMatrix{});
    CHECK(none.strong_count == 0);
    CHECK(none.assignment.empty());
}

TEST_CASE("brute force agrees on the worked example and corners") {
    const MatchingResult m = brute_force_matching(from_rows({{-1.0, -2.0}, {-3.0, 1.0}}));
    CHECK(m.strong_count == 2);
    CHECK(m.assignment == std::vector<int>{1, 0});
    CHECK(m.value == doctest::Approx(-5.0));

    CHECK(brute_force_matching(PayoffMatrix{}).strong_count == 0);

    const MatchingResult diag =
        brute_force_matching(from_rows({{-1.0, 5.0}, {5.0, -2.0}}));
    CHECK(diag.assignment == std::vector<int>{0, 1});

    PayoffMatrix big(9, 9);
    CHECK_THROWS_AS(brute_force_matching(big), std::invalid_argument);
}

TEST_CASE("oracle equivalence on 200 random matrices") {
    Rng rng = make_rng(424242);
    for (int it = 0; it < 200; ++it) {
        const int nd = 1 + static_cast<int>(uniform_index(rng, 6));
        const int ni = 1 + static_cast<int>(uniform_index(rng, 6));
        const PayoffMatrix P = random_matrix(rng, nd, ni);
        const MatchingResult fast = expert_matching(P);
        const MatchingResult slow = brute_force_matching(P);
        CHECK(fast.strong_count == slow.strong_count);
        CHECK(std::abs(fast.value - slow.value) < 1e-9);
        // identical tie-break contract, so the assignments agree as well
        CHECK(fast.assignment == slow.assignment);
    }
}

TEST_CASE("assignment is injective and strong") {
    Rng rng = make_rng(8);
    for (int it = 0; it < 50; ++it) {
        const PayoffMatrix P = random_matrix(rng, 6, 6, 0.4);
        const MatchingResult m = expert_matching(P);
        std::vector<int> used(P.n_int, 0);
        int count = 0;
        for (int i = 0; i < P.n_def; ++i) {
            const int j = m.assignment[i];
            if (j < 0) continue;
            ++count;
            CHECK(P.has(i, j));
            CHECK(P.at(i, j) < 0.0);
            CHECK(used[j] == 0);
            used[j] = 1;
        }
        CHECK(count == m.strong_count);
    }
}

TEST_CASE("removing a strong edge never increases the strong count") {
    Rng rng = make_rng(9);
    for (int it = 0; it < 50; ++it) {
        PayoffMatrix P = random_matrix(rng, 5, 5);
        const auto edges = strong_edges(P);
        if (edges.empty()) continue;
        const int before = expert_matching(P).strong_count;
        const auto [i, j] = edges[uniform_index(rng, edges.size())];
        P.clear(i, j);
        CHECK(expert_matching(P).strong_count <= before);
    }
}

TEST_CASE("positive rescaling keeps the selected assignment") {
    Rng rng = make_rng(10);
    for (int it = 0; it < 50; ++it) {
        PayoffMatrix P = random_matrix(rng, 5, 5);
        const MatchingResult base = expert_matching(P);
        for (double c : {0.25, 3.0, 1000.0}) {
            PayoffMatrix Q = P;
            for (double& v : Q.p) v *= c;
            const MatchingResult scaled = expert_matching(Q);
            CHECK(scaled.assignment == base.assignment);
        }
    }
}
