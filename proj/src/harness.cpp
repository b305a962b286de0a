#include "hemidef/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "hemidef/rng.hpp"

namespace hemidef {

double absolute_accuracy(int captures, int n) {
    if (n <= 0 || captures < 0 || captures > n)
        throw std::invalid_argument("absolute_accuracy: captures outside [0, n]");
    return static_cast<double>(captures) / n;
}

std::optional<double> comparative_accuracy(int captures_gnn, int captures_other) {
    if (captures_other <= 0) return std::nullopt;
    return static_cast<double>(captures_gnn) / captures_other;
}

std::uint64_t world_seed(std::uint64_t base, int size, int trial) {
    return mix_seed(base, static_cast<std::uint64_t>(size),
                    static_cast<std::uint64_t>(trial));
}

namespace {

PolicyFn make_policy_fn(PolicyKind kind, const ExperimentSpec& spec, double R,
                        Rng* rng) {
    PolicyContext ctx;
    ctx.perception = spec.perception;
    ctx.R = R;
    ctx.nu = spec.game.nu;
    ctx.khops = spec.khops;
    ctx.rng = rng;
    if (kind == PolicyKind::gnn) ctx.model = spec.gnn_model;
    if (kind == PolicyKind::mlp) ctx.model = spec.mlp_model;
    return [kind, ctx](const WorldState& w) { return decide(kind, w, ctx); };
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    for (PolicyKind k : spec.policies) {
        if (k == PolicyKind::gnn && !spec.gnn_model)
            throw std::runtime_error("run_experiment: gnn policy needs a checkpoint");
        if (k == PolicyKind::mlp && !spec.mlp_model)
            throw std::runtime_error("run_experiment: mlp policy needs a checkpoint");
        if (k == PolicyKind::expert && !spec.allow_expensive)
            for (int n : spec.team_sizes)
                if (n > spec.game.n_def_base)
                    throw std::runtime_error(
                        "run_experiment: expert above the base team size requires "
                        "allow_expensive");
    }

    struct Job {
        int size;
        PolicyKind policy;
        int trial;
    };
    std::vector<Job> jobs;
    for (int size : spec.team_sizes)
        for (PolicyKind policy : spec.policies)
            for (int trial = 0; trial < spec.trials; ++trial)
                jobs.push_back({size, policy, trial});

    ExperimentResult out;
    out.trials.resize(jobs.size());

#pragma omp parallel for schedule(dynamic)
    for (int jx = 0; jx < static_cast<int>(jobs.size()); ++jx) {
        const Job& job = jobs[jx];
        GameConfig game = spec.game;
        game.n = job.size;

        const std::uint64_t wseed = world_seed(spec.base_seed, job.size, job.trial);
        // the random policy draws from its own stream; the world seed stays shared
        Rng policy_rng =
            make_rng(mix_seed(wseed, static_cast<std::uint64_t>(job.policy) + 0x51u));

        const PolicyFn fn = make_policy_fn(job.policy, spec, game.radius(), &policy_rng);
        const EpisodeLog log = run_episode(game, fn, wseed, policy_name(job.policy));

        TrialRow row;
        row.size = job.size;
        row.policy = job.policy;
        row.trial = job.trial;
        row.captures = log.captures;
        row.intrusions = log.intrusions;
        row.timeouts = log.timeouts;
        row.fraction = absolute_accuracy(log.captures, job.size);
        row.terminal_time = log.terminal_time;
        out.trials[jx] = row;
    }

    for (int size : spec.team_sizes) {
        for (PolicyKind policy : spec.policies) {
            MetricsRow agg;
            agg.size = size;
            agg.policy = policy;
            double sum = 0.0, sum2 = 0.0, tsum = 0.0;
            int count = 0;
            for (const TrialRow& r : out.trials) {
                if (r.size != size || r.policy != policy) continue;
                sum += r.fraction;
                sum2 += r.fraction * r.fraction;
                tsum += r.terminal_time;
                ++count;
            }
            if (count > 0) {
                agg.mean_fraction = sum / count;
                agg.std_fraction =
                    std::sqrt(std::max(0.0, sum2 / count - agg.mean_fraction * agg.mean_fraction));
                agg.mean_terminal_time = tsum / count;
            }
            out.aggregates.push_back(agg);
        }
    }
    return out;
}

std::string experiment_csv(const ExperimentResult& result) {
    std::ostringstream os;
    os << "size,policy,trial,captures,intrusions,timeouts,fraction,terminal_time\n";
    os.precision(12);
    for (const TrialRow& r : result.trials)
        os << r.size << ',' << policy_name(r.policy) << ',' << r.trial << ',' << r.captures
           << ',' << r.intrusions << ',' << r.timeouts << ',' << r.fraction << ','
           << r.terminal_time << "\n";
    for (const MetricsRow& a : result.aggregates) {
        os << a.size << ',' << policy_name(a.policy) << ",mean,,,," << a.mean_fraction << ','
           << a.mean_terminal_time << "\n";
        os << a.size << ',' << policy_name(a.policy) << ",std,,,," << a.std_fraction << ","
           << "\n";
    }
    return os.str();
}

std::vector<SweepRow> sample_efficiency_sweep(const SweepOptions& opts) {
    if (!std::is_sorted(opts.demo_counts.begin(), opts.demo_counts.end()))
        throw std::invalid_argument("sample_efficiency_sweep: demo counts must ascend");

    std::vector<SweepRow> rows;
    for (long demos : opts.demo_counts) {
        GameConfig dg = opts.data_game;
        std::vector<GraphSample> samples = generate_dataset(
            static_cast<int>(demos), dg, opts.spec.perception, opts.data_seed);
        DatasetSplit split = split_dataset(std::move(samples), 0.6, 0.2,
                                           mix_seed(opts.data_seed, 0x5E1Du));

        ModelParams model = init_params(opts.model_seed, ModelKind::gnn, 1,
                                        opts.spec.perception.n_af,
                                        opts.spec.perception.n_df);
        const TrainHistory hist = train(model, split, opts.train_opts);
        const double final_train_loss =
            hist.epochs.empty() ? 0.0 : hist.epochs.back().train_loss;

        ExperimentSpec spec = opts.spec;
        spec.policies = {PolicyKind::gnn};
        spec.gnn_model = &model;
        const ExperimentResult res = run_experiment(spec);
        for (const MetricsRow& agg : res.aggregates) {
            SweepRow row;
            row.demos = demos;
            row.size = agg.size;
            row.mean_fraction = agg.mean_fraction;
            row.std_fraction = agg.std_fraction;
            row.final_train_loss = final_train_loss;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "demos,size,mean_fraction,std_fraction,final_train_loss\n";
    os.precision(12);
    for (const SweepRow& r : rows)
        os << r.demos << ',' << r.size << ',' << r.mean_fraction << ',' << r.std_fraction
           << ',' << r.final_train_loss << "\n";
    return os.str();
}

double env_double(const char* name, double fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    return std::strtod(v, nullptr);
}

int env_int(const char* name, int fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    return static_cast<int>(std::strtol(v, nullptr, 10));
}

void apply_env_overrides(GameConfig& game, PerceptionConfig& perception) {
    perception.fov = env_double("HEMIDEF_FOV", perception.fov);
    perception.r_c = env_double("HEMIDEF_RC", perception.r_c);
    perception.n_af = env_int("HEMIDEF_NAF", perception.n_af);
    perception.n_df = env_int("HEMIDEF_NDF", perception.n_df);
    game.epsilon = env_double("HEMIDEF_EPSILON", game.epsilon);
    game.dt = env_double("HEMIDEF_DT", game.dt);
    game.nu = env_double("HEMIDEF_NU", game.nu);
    game.t_max_factor = env_double("HEMIDEF_TMAX_FACTOR", game.t_max_factor);
}

} // namespace hemidef
