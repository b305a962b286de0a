#include "hemidef/policies.hpp"

#include <stdexcept>

#include "hemidef/breach.hpp"

namespace hemidef {

const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::expert: return "expert";
        case PolicyKind::gnn: return "gnn";
        case PolicyKind::greedy: return "greedy";
        case PolicyKind::random: return "random";
        case PolicyKind::mlp: return "mlp";
    }
    return "?";
}

PolicyKind policy_from_name(const std::string& name) {
    if (name == "expert") return PolicyKind::expert;
    if (name == "gnn") return PolicyKind::gnn;
    if (name == "greedy") return PolicyKind::greedy;
    if (name == "random") return PolicyKind::random;
    if (name == "mlp") return PolicyKind::mlp;
    throw std::invalid_argument("unknown policy: " + name);
}

PayoffMatrix build_payoff_matrix(const WorldState& world, const PolicyContext& ctx) {
    const int nd = static_cast<int>(world.defenders.size());
    const int ni = static_cast<int>(world.intruders.size());
    PayoffMatrix P(nd, ni);
    for (int i = 0; i < nd; ++i) {
        if (!world.defenders[i].alive) continue;
        for (int j = 0; j < ni; ++j) {
            const IntruderPose& a = world.intruders[j];
            if (a.status != IntruderStatus::active) continue;
            if (!visible(world.defenders[i], a, ctx.perception.fov, ctx.R)) continue;
            try {
                P.set(i, j, pair_payoff(world.defenders[i], a, ctx.R, ctx.nu));
            } catch (const std::runtime_error&) {
                // unsolvable pair stays absent
            }
        }
    }
    return P;
}

PolicyDecision expert_policy(const WorldState& world, const PolicyContext& ctx) {
    const MatchingResult m = expert_matching(build_payoff_matrix(world, ctx));
    PolicyDecision d;
    d.target = m.assignment;
    d.slot.assign(world.defenders.size(), -1);
    return d;
}

namespace {

PolicyDecision network_policy(const WorldState& world, const PolicyContext& ctx) {
    if (!ctx.model) throw std::invalid_argument("network policy requires a model");
    const int n = static_cast<int>(world.defenders.size());

    std::vector<LocalPerception> percepts;
    const Matrix x = feature_matrix(world, ctx.perception, ctx.R, &percepts);
    const CommGraph g = build_comm_graph(world.defenders, ctx.perception.r_c, ctx.R);
    const Matrix logits = forward(*ctx.model, x, g.s);

    PolicyDecision d;
    d.target.assign(n, -1);
    d.slot.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!world.defenders[i].alive) continue;
        int best = -1;
        for (int s = 0; s < ctx.perception.n_af; ++s) {
            if (!percepts[i].intruder_mask[s]) continue;
            if (best < 0 || logits.at(i, s) > logits.at(i, best)) best = s;
        }
        if (best >= 0) {
            d.slot[i] = best;
            d.target[i] = percepts[i].intruder_ids[best];
        }
    }
    return d;
}

} // namespace

PolicyDecision gnn_policy(const WorldState& world, const PolicyContext& ctx) {
    if (ctx.model && ctx.model->kind != ModelKind::gnn)
        throw std::invalid_argument("gnn_policy: checkpoint is not a gnn model");
    return network_policy(world, ctx);
}

PolicyDecision mlp_policy(const WorldState& world, const PolicyContext& ctx) {
    if (ctx.model && ctx.model->kind != ModelKind::mlp)
        throw std::invalid_argument("mlp_policy: checkpoint is not an mlp model");
    return network_policy(world, ctx);
}

PolicyDecision greedy_policy(const WorldState& world, const PolicyContext& ctx) {
    const int n = static_cast<int>(world.defenders.size());
    PolicyDecision d;
    d.target.assign(n, -1);
    d.slot.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!world.defenders[i].alive) continue;
        double best_p = 0.0;
        int best = -1;
        for (int j : khop_sensible(i, world, ctx.perception, ctx.R, ctx.khops)) {
            try {
                const double p = pair_payoff(world.defenders[i], world.intruders[j],
                                             ctx.R, ctx.nu);
                if (best < 0 || p < best_p) {
                    best_p = p;
                    best = j;
                }
            } catch (const std::runtime_error&) {
            }
        }
        d.target[i] = best;
    }
    return d;
}

PolicyDecision random_policy(const WorldState& world, const PolicyContext& ctx) {
    if (!ctx.rng) throw std::invalid_argument("random_policy requires a seeded generator");
    const int n = static_cast<int>(world.defenders.size());
    PolicyDecision d;
    d.target.assign(n, -1);
    d.slot.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!world.defenders[i].alive) continue;
        const std::vector<int> cand = khop_sensible(i, world, ctx.perception, ctx.R, ctx.khops);
        if (!cand.empty()) d.target[i] = cand[uniform_index(*ctx.rng, cand.size())];
    }
    return d;
}

PolicyDecision decide(PolicyKind kind, const WorldState& world, const PolicyContext& ctx) {
    switch (kind) {
        case PolicyKind::expert: return expert_policy(world, ctx);
        case PolicyKind::gnn: return gnn_policy(world, ctx);
        case PolicyKind::greedy: return greedy_policy(world, ctx);
        case PolicyKind::random: return random_policy(world, ctx);
        case PolicyKind::mlp: return mlp_policy(world, ctx);
    }
    throw std::logic_error("decide: unreachable");
}

} // namespace hemidef
