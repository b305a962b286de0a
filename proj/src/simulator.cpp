#include "hemidef/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "hemidef/breach.hpp"
#include "hemidef/rng.hpp"

namespace hemidef {

double scale_radius(int n, int n_def) {
    if (n < 1 || n_def < 1)
        throw std::invalid_argument("scale_radius: team sizes must be positive");
    return std::sqrt(static_cast<double>(n) / n_def);
}

WorldState init_random(const GameConfig& cfg, std::uint64_t seed) {
    const double R = cfg.radius();
    Rng rng = make_rng(seed);
    WorldState w;
    w.defenders.resize(cfg.n);
    w.intruders.resize(cfg.n);
    for (auto& d : w.defenders) {
        d.psi = wrap_angle(uniform_range(rng, -kPi, kPi));
        d.phi = std::asin(uniform01(rng));  // area-uniform elevation
        d.alive = true;
    }
    for (auto& a : w.intruders) {
        a.psi = wrap_angle(uniform_range(rng, -kPi, kPi));
        a.r = uniform_range(rng, 1.5 * R, 5.0 * R);
        a.status = IntruderStatus::active;
    }
    return w;
}

namespace {

Point3 ring_point(double psi, double R) { return {R * std::cos(psi), R * std::sin(psi), 0.0}; }

// Near azimuthal alignment the two governing-equation roots mirror each other
// and re-solving every dt makes both players chatter across the fold, so the
// defender descends without ever closing azimuth. Within a band of a couple
// of steps of azimuth travel, motion targets snap to the symmetric solution
// (breaching point at the intruder's meridian foot). Assignment payoffs are
// never snapped.
constexpr double kAlignSnapSteps = 2.0;

BreachSolution solve_pair_for_motion(const DefenderPose& d, const IntruderPose& a,
                                     double R, double nu, double dt) {
    const double band = kAlignSnapSteps * dt / R;
    if (std::abs(wrap_angle(a.psi - d.psi)) <= band) {
        DefenderPose aligned = d;
        aligned.psi = a.psi;
        return solve_pair(aligned, a, R, nu);
    }
    return solve_pair(d, a, R, nu);
}

// Where this intruder is headed: its pair's breaching point, or straight to
// the nearest perimeter point close-in or when no solvable opponent exists.
Point3 intruder_target(const WorldState& world, int j, const GameConfig& cfg,
                       const std::vector<int>& opponent) {
    const IntruderPose& a = world.intruders[j];
    const double R = cfg.radius();
    if (a.r <= 1.05 * R || opponent[j] < 0) return ring_point(a.psi, R);
    try {
        const BreachSolution s =
            solve_pair_for_motion(world.defenders[opponent[j]], a, R, cfg.nu, cfg.dt);
        return ring_point(s.breach_psi_abs, R);
    } catch (const std::runtime_error&) {
        return ring_point(a.psi, R);
    }
}

std::vector<int> pick_opponents(const WorldState& world, const GameConfig& cfg) {
    const int n = static_cast<int>(world.intruders.size());
    std::vector<int> opp(n, -1);

    if (cfg.opponent_rule == OpponentRule::expert_matched) {
        // full-information matching from the intruders' side
        PolicyContext ctx;
        ctx.perception.fov = kTwoPi;  // omniscient: every pair is sensible
        ctx.R = cfg.radius();
        ctx.nu = cfg.nu;
        const MatchingResult m = expert_matching(build_payoff_matrix(world, ctx));
        for (int i = 0; i < static_cast<int>(m.assignment.size()); ++i)
            if (m.assignment[i] >= 0) opp[m.assignment[i]] = i;
    }

    for (int j = 0; j < n; ++j) {
        if (world.intruders[j].status != IntruderStatus::active || opp[j] >= 0) continue;
        const Point3 a3 = intruder_cartesian(world.intruders[j]);
        double best = 0.0;
        for (int i = 0; i < static_cast<int>(world.defenders.size()); ++i) {
            if (!world.defenders[i].alive) continue;
            const double d = dist3(a3, defender_cartesian(world.defenders[i], cfg.radius()));
            if (opp[j] < 0 || d < best) {
                opp[j] = i;
                best = d;
            }
        }
    }
    return opp;
}

struct PairDist {
    double d;
    int def;
    int intr;
};

} // namespace

void step(WorldState& world, const PolicyDecision& decisions, const GameConfig& cfg,
          std::vector<Event>* events) {
    const double R = cfg.radius();
    const double dt = cfg.dt;
    const double t_next = world.t + dt;

    // (1) assigned defenders advance toward their pairs' breaching points
    for (int i = 0; i < static_cast<int>(world.defenders.size()); ++i) {
        DefenderPose& d = world.defenders[i];
        if (!d.alive) continue;
        const int j = i < static_cast<int>(decisions.target.size()) ? decisions.target[i] : -1;
        if (j < 0 || world.intruders[j].status != IntruderStatus::active) continue;
        try {
            const BreachSolution s = solve_pair_for_motion(d, world.intruders[j], R, cfg.nu, dt);
            d = step_defender(d, s.breach_psi_abs, 0.0, dt, R);
        } catch (const std::runtime_error&) {
            // unsolvable pair: hold position this step
        }
    }

    // (2) intruders advance toward their own breaching points
    const std::vector<int> opponents = pick_opponents(world, cfg);
    for (int j = 0; j < static_cast<int>(world.intruders.size()); ++j) {
        IntruderPose& a = world.intruders[j];
        if (a.status != IntruderStatus::active) continue;
        a = step_intruder(a, intruder_target(world, j, cfg, opponents), dt);
    }

    // (3) captures, nearest pair first, each agent consumed at most once
    std::vector<PairDist> close;
    for (int i = 0; i < static_cast<int>(world.defenders.size()); ++i) {
        if (!world.defenders[i].alive) continue;
        const Point3 d3 = defender_cartesian(world.defenders[i], R);
        for (int j = 0; j < static_cast<int>(world.intruders.size()); ++j) {
            if (world.intruders[j].status != IntruderStatus::active) continue;
            const double d = dist3(d3, intruder_cartesian(world.intruders[j]));
            if (d <= cfg.epsilon) close.push_back({d, i, j});
        }
    }
    std::sort(close.begin(), close.end(), [](const PairDist& a, const PairDist& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.def != b.def) return a.def < b.def;
        return a.intr < b.intr;
    });
    for (const PairDist& pd : close) {
        if (!world.defenders[pd.def].alive) continue;
        if (world.intruders[pd.intr].status != IntruderStatus::active) continue;
        world.defenders[pd.def].alive = false;
        world.intruders[pd.intr].status = IntruderStatus::captured;
        if (events)
            events->push_back({t_next, EventKind::capture, pd.def, pd.intr,
                               intruder_cartesian(world.intruders[pd.intr])});
    }

    // (4) intrusions
    for (int j = 0; j < static_cast<int>(world.intruders.size()); ++j) {
        IntruderPose& a = world.intruders[j];
        if (a.status == IntruderStatus::active && a.r <= R) {
            a.status = IntruderStatus::intruded;
            if (events)
                events->push_back({t_next, EventKind::intrusion, -1, j,
                                   intruder_cartesian(a)});
        }
    }

    // (5) clock
    world.t = t_next;
}

EpisodeLog run_episode(const GameConfig& cfg, const PolicyFn& policy, std::uint64_t seed,
                       const std::string& policy_label, const EpisodeOptions& opts) {
    const double R = cfg.radius();
    EpisodeLog log;
    log.config = cfg;
    log.seed = seed;
    log.policy = policy_label;

    WorldState world = init_random(cfg, seed);
    if (opts.keep_trace && opts.trace) opts.trace->push_back(world);

    PolicyDecision decisions;
    long step_idx = 0;
    auto active_left = [&]() {
        int n = 0;
        for (const auto& a : world.intruders)
            if (a.status == IntruderStatus::active) ++n;
        return n;
    };

    while (active_left() > 0 && world.t < cfg.t_max() - 1e-12) {
        if (step_idx % std::max(cfg.reassign_period, 1) == 0) decisions = policy(world);

        const std::size_t n_before = log.events.size();
        step(world, decisions, cfg, &log.events);
        for (std::size_t e = n_before; e < log.events.size(); ++e) {
            if (log.events[e].kind == EventKind::capture) ++log.captures;
            else ++log.intrusions;
        }

        for (const auto& d : world.defenders) {
            const Point3 p = defender_cartesian(d, R);
            const double err =
                std::abs(std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z) - R);
            if (err > log.max_sphere_err) log.max_sphere_err = err;
        }

        if (opts.keep_trace && opts.trace) opts.trace->push_back(world);
        ++step_idx;
    }

    log.timeouts = active_left();
    log.terminal_time = world.t;
    return log;
}

std::string episode_to_json(const EpisodeLog& log) {
    nlohmann::json doc;
    doc["config"] = {
        {"n", log.config.n},
        {"n_def_base", log.config.n_def_base},
        {"radius", log.config.radius()},
        {"dt", log.config.dt},
        {"epsilon", log.config.epsilon},
        {"t_max", log.config.t_max()},
        {"nu", log.config.nu},
        {"opponent_rule", log.config.opponent_rule == OpponentRule::nearest_defender
                              ? "nearest_defender"
                              : "expert_matched"},
        {"reassign_period", log.config.reassign_period},
        {"policy", log.policy},
    };
    doc["seed"] = log.seed;
    nlohmann::json events = nlohmann::json::array();
    for (const Event& e : log.events) {
        nlohmann::json je;
        je["t"] = e.t;
        je["kind"] = e.kind == EventKind::capture ? "capture" : "intrusion";
        if (e.defender >= 0) je["defender"] = e.defender;
        je["intruder"] = e.intruder;
        je["location"] = {e.location.x, e.location.y, e.location.z};
        events.push_back(std::move(je));
    }
    doc["events"] = std::move(events);
    doc["terminal_time"] = log.terminal_time;
    doc["captures"] = log.captures;
    doc["intrusions"] = log.intrusions;
    doc["timeouts"] = log.timeouts;
    return doc.dump();
}

} // namespace hemidef
