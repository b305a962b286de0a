#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hemidef/perception.hpp"
#include "hemidef/rng.hpp"
#include "hemidef/simulator.hpp"

using namespace hemidef;

namespace {

WorldState random_world(int n, std::uint64_t seed) {
    GameConfig cfg;
    cfg.n = n;
    return init_random(cfg, seed);
}

} // namespace

TEST_CASE("visibility against the outward boresight") {
    const DefenderPose d{0.0, 0.0, true};  // footprint (1, 0)
    CHECK(visible(d, {0.0, 2.0, IntruderStatus::active}, kPi, 1.0));
    // intruder behind the footprint, angle pi
    CHECK_FALSE(visible(d, {0.0, 0.5, IntruderStatus::active}, kPi, 1.0));
    // angle exactly pi/2 is inside the inclusive fov = pi boundary
    const IntruderPose side{kPi / 4, std::sqrt(2.0), IntruderStatus::active};  // (1, 1)
    CHECK(visible(d, side, kPi, 1.0));
}

TEST_CASE("feature slots fill closest-first with dummy padding") {
    PerceptionConfig cfg;
    WorldState w;
    w.defenders.push_back({0.0, 0.3, true});
    w.intruders.push_back({0.1, 3.0, IntruderStatus::active});
    w.intruders.push_back({-0.2, 2.0, IntruderStatus::active});

    const LocalPerception lp = extract_features(0, w, cfg, 1.0);
    CHECK(lp.intruder_mask == std::vector<std::uint8_t>{1, 1, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(lp.intruder_ids[0] == 1);  // nearer of the two
    CHECK(lp.intruder_ids[1] == 0);
    CHECK(lp.intruder_feats[0].psi == doctest::Approx(-0.2));
    CHECK(lp.intruder_feats[0].phi == doctest::Approx(0.3));
    CHECK(lp.intruder_feats[0].r == doctest::Approx(2.0));
    for (int s = 2; s < cfg.n_af; ++s) {
        CHECK(lp.intruder_feats[s].psi == cfg.dummy.psi);
        CHECK(lp.intruder_feats[s].phi == cfg.dummy.phi);
        CHECK(lp.intruder_feats[s].r == cfg.dummy.r);
        CHECK(lp.intruder_ids[s] == -1);
    }
    // no neighbours in range: all defender rows dummy
    for (int s = 0; s < cfg.n_df; ++s) {
        CHECK(lp.defender_mask[s] == 0);
        CHECK(lp.defender_feats[s].r == cfg.dummy.r);
    }
}

TEST_CASE("overfull vision keeps only the closest ten") {
    PerceptionConfig cfg;
    WorldState w;
    w.defenders.push_back({0.0, 0.1, true});
    for (int j = 0; j < 12; ++j)
        w.intruders.push_back({0.01 * j, 1.5 + 0.1 * j, IntruderStatus::active});

    const LocalPerception lp = extract_features(0, w, cfg, 1.0);
    CHECK(std::count(lp.intruder_mask.begin(), lp.intruder_mask.end(), 1) == 10);
    for (int s = 0; s < 10; ++s) CHECK(lp.intruder_ids[s] == s);  // already sorted
    // strictly falling off after ten: indices 10 and 11 dropped
    CHECK(std::find(lp.intruder_ids.begin(), lp.intruder_ids.end(), 10) ==
          lp.intruder_ids.end());
}

TEST_CASE("feature extraction ignores intruder storage order") {
    PerceptionConfig cfg;
    WorldState w = random_world(6, 99);
    const Matrix base = feature_matrix(w, cfg, 1.0);

    WorldState shuffled = w;
    std::reverse(shuffled.intruders.begin(), shuffled.intruders.end());
    const Matrix out = feature_matrix(shuffled, cfg, 1.0);
    for (std::size_t i = 0; i < base.data.size(); ++i) CHECK(out.data[i] == base.data[i]);
}

TEST_CASE("comm graph is symmetric, zero-diagonal, range-gated") {
    std::vector<DefenderPose> three{{0.0, 0.0, true}, {0.4, 0.0, true}, {kPi, 0.0, true}};
    const CommGraph g = build_comm_graph(three, 1.0, 1.0);
    CHECK(g.s.at(0, 1) == 1.0);  // chord 2 sin(0.2) ~ 0.397
    CHECK(g.s.at(1, 0) == 1.0);
    CHECK(g.s.at(0, 2) == 0.0);  // opposite side of the ring
    for (int i = 0; i < 3; ++i) CHECK(g.s.at(i, i) == 0.0);

    const CommGraph single = build_comm_graph({{0.0, 0.0, true}}, 1.0, 1.0);
    CHECK(single.s.rows == 1);
    CHECK(single.s.at(0, 0) == 0.0);

    Rng rng = make_rng(7);
    for (int it = 0; it < 20; ++it) {
        const WorldState w = random_world(8, 1000 + it);
        const CommGraph gg = build_comm_graph(w.defenders, 1.0, 1.0);
        for (int i = 0; i < 8; ++i) {
            CHECK(gg.s.at(i, i) == 0.0);
            for (int j = 0; j < 8; ++j) CHECK(gg.s.at(i, j) == gg.s.at(j, i));
        }
    }
}

TEST_CASE("khop expansion unions visible sets and grows with k") {
    PerceptionConfig cfg;
    // two defenders facing away from each other, within comm range at the pole
    WorldState w;
    w.defenders.push_back({0.0, 1.4, true});
    w.defenders.push_back({kPi, 1.4, true});
    w.intruders.push_back({0.0, 2.0, IntruderStatus::active});
    w.intruders.push_back({kPi, 2.0, IntruderStatus::active});

    const auto own = khop_sensible(0, w, cfg, 1.0, 0);
    CHECK(own == std::vector<int>{0});
    const auto one_hop = khop_sensible(0, w, cfg, 1.0, 1);
    CHECK(one_hop == std::vector<int>{0, 1});

    // isolated defender: any k returns its own set
    WorldState iso;
    iso.defenders.push_back({0.0, 0.0, true});
    iso.intruders.push_back({0.0, 3.0, IntruderStatus::active});
    CHECK(khop_sensible(0, iso, cfg, 1.0, 0) == khop_sensible(0, iso, cfg, 1.0, 5));

    Rng rng = make_rng(3);
    for (int it = 0; it < 30; ++it) {
        const WorldState rw = random_world(8, 500 + it);
        const int i = static_cast<int>(uniform_index(rng, 8));
        std::vector<int> prev;
        for (int k = 0; k <= 3; ++k) {
            const auto cur = khop_sensible(i, rw, cfg, 1.0, k);
            CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
            prev = cur;
        }
    }
}

TEST_CASE("masked rows are bitwise equal to the dummy sentinel") {
    PerceptionConfig cfg;
    Rng rng = make_rng(4);
    for (int it = 0; it < 20; ++it) {
        const WorldState w = random_world(5, 300 + it);
        for (int i = 0; i < 5; ++i) {
            const LocalPerception lp = extract_features(i, w, cfg, 1.0);
            for (int s = 0; s < cfg.n_af; ++s)
                if (!lp.intruder_mask[s]) {
                    CHECK(lp.intruder_feats[s].psi == cfg.dummy.psi);
                    CHECK(lp.intruder_feats[s].phi == cfg.dummy.phi);
                    CHECK(lp.intruder_feats[s].r == cfg.dummy.r);
                }
            for (int s = 0; s < cfg.n_df; ++s)
                if (!lp.defender_mask[s]) {
                    CHECK(lp.defender_feats[s].psi == cfg.dummy.psi);
                    CHECK(lp.defender_feats[s].phi == cfg.dummy.phi);
                    CHECK(lp.defender_feats[s].r == cfg.dummy.r);
                }
        }
    }
}

TEST_CASE("valid intruder rows sorted by ascending ground distance") {
    PerceptionConfig cfg;
    Rng rng = make_rng(13);
    for (int it = 0; it < 30; ++it) {
        const WorldState w = random_world(6, 700 + it);
        for (int i = 0; i < 6; ++i) {
            const LocalPerception lp = extract_features(i, w, cfg, 1.0);
            const Point3 foot = defender_cartesian(w.defenders[i], 1.0);
            double prev = -1.0;
            for (int s = 0; s < cfg.n_af; ++s) {
                if (!lp.intruder_mask[s]) continue;
                const Point3 a = intruder_cartesian(w.intruders[lp.intruder_ids[s]]);
                const double dx = a.x - foot.x, dy = a.y - foot.y;
                const double dist = std::sqrt(dx * dx + dy * dy);
                CHECK(dist >= prev - 1e-12);
                prev = dist;
            }
        }
    }
}
