#include "hemidef/perception.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace hemidef {

bool visible(const DefenderPose& d, const IntruderPose& a, double fov, double R) {
    const Point3 d3 = defender_cartesian(d, R);
    const Point3 a3 = intruder_cartesian(a);
    const double vx = a3.x - d3.x;
    const double vy = a3.y - d3.y;
    const double norm = std::sqrt(vx * vx + vy * vy);
    if (norm < 1e-300) return true;  // intruder at the footprint
    const double bx = std::cos(d.psi);
    const double by = std::sin(d.psi);
    const double c = std::clamp((bx * vx + by * vy) / norm, -1.0, 1.0);
    return std::acos(c) <= fov / 2.0;
}

namespace {

struct rank_entry {
    double dist;
    double tie;
    int idx;
};

} // namespace

LocalPerception extract_features(int i, const WorldState& world,
                                 const PerceptionConfig& cfg, double R) {
    const DefenderPose& self = world.defenders[i];
    LocalPerception lp;
    lp.intruder_feats.assign(cfg.n_af, cfg.dummy);
    lp.intruder_ids.assign(cfg.n_af, -1);
    lp.intruder_mask.assign(cfg.n_af, 0);
    lp.defender_feats.assign(cfg.n_df, cfg.dummy);
    lp.defender_mask.assign(cfg.n_df, 0);
    if (!self.alive) return lp;

    const Point3 self3 = defender_cartesian(self, R);

    std::vector<rank_entry> seen;
    for (int j = 0; j < static_cast<int>(world.intruders.size()); ++j) {
        const IntruderPose& a = world.intruders[j];
        if (a.status != IntruderStatus::active) continue;
        if (!visible(self, a, cfg.fov, R)) continue;
        const Point3 a3 = intruder_cartesian(a);
        const double dx = a3.x - self3.x, dy = a3.y - self3.y;
        seen.push_back({std::sqrt(dx * dx + dy * dy),
                        std::abs(wrap_angle(a.psi - self.psi)), j});
    }
    std::sort(seen.begin(), seen.end(), [](const rank_entry& a, const rank_entry& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.tie != b.tie) return a.tie < b.tie;
        return a.idx < b.idx;
    });
    const int n_keep = std::min<int>(cfg.n_af, static_cast<int>(seen.size()));
    for (int s = 0; s < n_keep; ++s) {
        const IntruderPose& a = world.intruders[seen[s].idx];
        lp.intruder_feats[s] = {wrap_angle(a.psi - self.psi), self.phi, a.r / R};
        lp.intruder_ids[s] = seen[s].idx;
        lp.intruder_mask[s] = 1;
    }

    std::vector<rank_entry> nbrs;
    for (int j = 0; j < static_cast<int>(world.defenders.size()); ++j) {
        if (j == i || !world.defenders[j].alive) continue;
        const double chord = defender_chord(self, world.defenders[j], R);
        if (chord > cfg.r_c) continue;
        nbrs.push_back({chord, 0.0, j});
    }
    std::sort(nbrs.begin(), nbrs.end(), [](const rank_entry& a, const rank_entry& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return a.idx < b.idx;
    });
    const int d_keep = std::min<int>(cfg.n_df, static_cast<int>(nbrs.size()));
    for (int s = 0; s < d_keep; ++s) {
        const DefenderPose& o = world.defenders[nbrs[s].idx];
        lp.defender_feats[s] = {wrap_angle(o.psi - self.psi), o.phi - self.phi,
                                nbrs[s].dist / R};
        lp.defender_mask[s] = 1;
    }
    return lp;
}

CommGraph build_comm_graph(const std::vector<DefenderPose>& defenders, double r_c,
                           double R) {
    const int n = static_cast<int>(defenders.size());
    CommGraph g;
    g.s = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        if (!defenders[i].alive) continue;
        for (int j = i + 1; j < n; ++j) {
            if (!defenders[j].alive) continue;
            if (defender_chord(defenders[i], defenders[j], R) <= r_c) {
                g.s.at(i, j) = 1.0;
                g.s.at(j, i) = 1.0;
            }
        }
    }
    return g;
}

std::vector<int> khop_sensible(int i, const WorldState& world,
                               const PerceptionConfig& cfg, double R, int k) {
    const int n = static_cast<int>(world.defenders.size());
    const CommGraph g = build_comm_graph(world.defenders, cfg.r_c, R);

    std::vector<int> hop(n, -1);
    std::queue<int> q;
    hop[i] = 0;
    q.push(i);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        if (hop[u] == k) continue;
        for (int v = 0; v < n; ++v)
            if (g.s.at(u, v) != 0.0 && hop[v] < 0) {
                hop[v] = hop[u] + 1;
                q.push(v);
            }
    }

    std::vector<std::uint8_t> in_set(world.intruders.size(), 0);
    for (int u = 0; u < n; ++u) {
        if (hop[u] < 0 || !world.defenders[u].alive) continue;
        for (int j = 0; j < static_cast<int>(world.intruders.size()); ++j)
            if (world.intruders[j].status == IntruderStatus::active &&
                visible(world.defenders[u], world.intruders[j], cfg.fov, R))
                in_set[j] = 1;
    }
    std::vector<int> out;
    for (int j = 0; j < static_cast<int>(in_set.size()); ++j)
        if (in_set[j]) out.push_back(j);
    return out;
}

Matrix feature_matrix(const WorldState& world, const PerceptionConfig& cfg, double R,
                      std::vector<LocalPerception>* percepts) {
    const int n = static_cast<int>(world.defenders.size());
    Matrix x(n, 3 * (cfg.n_af + cfg.n_df));
    if (percepts) percepts->resize(n);
    for (int i = 0; i < n; ++i) {
        LocalPerception lp = extract_features(i, world, cfg, R);
        double* row = x.row(i);
        int c = 0;
        for (const RelativeCoord& f : lp.intruder_feats) {
            row[c++] = f.psi;
            row[c++] = f.phi;
            row[c++] = f.r;
        }
        for (const RelativeCoord& f : lp.defender_feats) {
            row[c++] = f.psi;
            row[c++] = f.phi;
            row[c++] = f.r;
        }
        if (percepts) (*percepts)[i] = std::move(lp);
    }
    return x;
}

} // namespace hemidef
