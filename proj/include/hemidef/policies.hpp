#pragma once

#include <vector>

#include "hemidef/matching.hpp"
#include "hemidef/neuralnet.hpp"
#include "hemidef/perception.hpp"
#include "hemidef/rng.hpp"
#include "hemidef/world.hpp"

namespace hemidef {

// Per-defender choice of intruder (world index, -1 when none) plus the local
// feature slot it came from where a network produced it (-1 otherwise).
struct PolicyDecision {
    std::vector<int> target;
    std::vector<int> slot;
};

enum class PolicyKind { expert, gnn, greedy, random, mlp };

const char* policy_name(PolicyKind kind);
PolicyKind policy_from_name(const std::string& name);

// Everything a policy may consult besides the world itself.
struct PolicyContext {
    PerceptionConfig perception;
    double R = 1.0;
    double nu = 1.0;
    int khops = 1;                      // sensing expansion for greedy/random
    const ModelParams* model = nullptr; // gnn or mlp checkpoint
    Rng* rng = nullptr;                 // stream for the random policy
};

// Payoffs over (alive defender, visible active intruder) pairs; entries are
// absent when the pair is not sensible or the one-on-one solve fails.
PayoffMatrix build_payoff_matrix(const WorldState& world, const PolicyContext& ctx);

// Centralized maximum matching on the payoff matrix.
PolicyDecision expert_policy(const WorldState& world, const PolicyContext& ctx);

// Masked argmax over the network's candidate slots, mapped to world indices.
PolicyDecision gnn_policy(const WorldState& world, const PolicyContext& ctx);

// Independent per-defender argmin payoff over the k-hop sensible set.
PolicyDecision greedy_policy(const WorldState& world, const PolicyContext& ctx);

// Uniform choice over the k-hop sensible set.
PolicyDecision random_policy(const WorldState& world, const PolicyContext& ctx);

// Same surface as gnn_policy for a model without graph layers.
PolicyDecision mlp_policy(const WorldState& world, const PolicyContext& ctx);

PolicyDecision decide(PolicyKind kind, const WorldState& world, const PolicyContext& ctx);

} // namespace hemidef
