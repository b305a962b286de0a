#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hemidef/policies.hpp"
#include "hemidef/world.hpp"

namespace hemidef {

enum class OpponentRule { nearest_defender, expert_matched };

// R scales with team size so agent density stays constant: sqrt(n / n_def).
double scale_radius(int n, int n_def);

struct GameConfig {
    int n = 10;
    int n_def_base = 10;
    double base_radius = 1.0;
    double dt = 0.01;
    double epsilon = 0.02;       // capture distance; dt < epsilon so captures cannot tunnel
    double t_max_factor = 50.0;  // hard cap at t_max_factor * R seconds
    double nu = 1.0;
    OpponentRule opponent_rule = OpponentRule::nearest_defender;
    int reassign_period = 1;     // steps between policy re-queries

    double radius() const { return scale_radius(n, n_def_base) * base_radius; }
    double t_max() const { return t_max_factor * radius(); }
};

enum class EventKind { capture, intrusion };

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::capture;
    int defender = -1;  // -1 for intrusions
    int intruder = -1;
    Point3 location;
};

struct EpisodeLog {
    GameConfig config;
    std::uint64_t seed = 0;
    std::string policy;
    std::vector<Event> events;
    double terminal_time = 0.0;
    int captures = 0;
    int intrusions = 0;
    int timeouts = 0;
    double max_sphere_err = 0.0;  // worst |  ||x_D|| - R  | seen during the run
};

// Defenders area-uniform on the dome, intruders uniform in azimuth with
// r in (1.5 R, 5 R]; reproducible per seed.
WorldState init_random(const GameConfig& cfg, std::uint64_t seed);

// One dt of play: defenders advance toward their pairs' breaching points,
// intruders toward theirs, then captures (nearest pair first, each agent at
// most once) and intrusions are resolved and the clock advances. Events, if
// requested, are stamped with the post-step clock.
void step(WorldState& world, const PolicyDecision& decisions, const GameConfig& cfg,
          std::vector<Event>* events = nullptr);

using PolicyFn = std::function<PolicyDecision(const WorldState&)>;

struct EpisodeOptions {
    bool keep_trace = false;                       // per-step world snapshots
    std::vector<WorldState>* trace = nullptr;
};

EpisodeLog run_episode(const GameConfig& cfg, const PolicyFn& policy,
                       std::uint64_t seed, const std::string& policy_label = "",
                       const EpisodeOptions& opts = {});

std::string episode_to_json(const EpisodeLog& log);

} // namespace hemidef
