#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hemidef/datatrain.hpp"
#include "hemidef/policies.hpp"
#include "hemidef/simulator.hpp"

namespace hemidef {

// captures / team size
double absolute_accuracy(int captures, int n);

// gnn captures / other captures; absent when the denominator is zero.
std::optional<double> comparative_accuracy(int captures_gnn, int captures_other);

struct ExperimentSpec {
    std::vector<int> team_sizes;
    std::vector<PolicyKind> policies;
    int trials = 10;
    std::uint64_t base_seed = 0;
    GameConfig game;                     // n is overridden per team size
    PerceptionConfig perception;
    const ModelParams* gnn_model = nullptr;
    const ModelParams* mlp_model = nullptr;
    bool allow_expensive = false;        // admit expert above the base team size
    int khops = 1;
};

struct TrialRow {
    int size = 0;
    PolicyKind policy = PolicyKind::random;
    int trial = 0;
    int captures = 0;
    int intrusions = 0;
    int timeouts = 0;
    double fraction = 0.0;
    double terminal_time = 0.0;
};

struct MetricsRow {
    int size = 0;
    PolicyKind policy = PolicyKind::random;
    double mean_fraction = 0.0;
    double std_fraction = 0.0;  // population std over trials
    double mean_terminal_time = 0.0;
};

struct ExperimentResult {
    std::vector<TrialRow> trials;
    std::vector<MetricsRow> aggregates;
};

// Seed for the shared world of (size, trial): identical across policies so
// comparisons are paired.
std::uint64_t world_seed(std::uint64_t base, int size, int trial);

// Runs every (size, policy, trial) cell; episodes are independent and run in
// parallel, results ordered by (size, policy, trial).
ExperimentResult run_experiment(const ExperimentSpec& spec);

// CSV with the frozen schema:
//   size,policy,trial,captures,intrusions,timeouts,fraction,terminal_time
// followed by aggregate rows with trial = mean / std.
std::string experiment_csv(const ExperimentResult& result);

struct SweepRow {
    long demos = 0;
    int size = 0;
    double mean_fraction = 0.0;
    double std_fraction = 0.0;
    double final_train_loss = 0.0;
};

struct SweepOptions {
    std::vector<long> demo_counts;  // ascending
    ExperimentSpec spec;            // evaluated with the gnn policy only
    GameConfig data_game;           // snapshot generator configuration
    TrainOptions train_opts;
    std::uint64_t data_seed = 1;
    std::uint64_t model_seed = 7;
};

// Trains one model per demonstration count (shared seeds) and evaluates the
// fraction caught across the spec's team sizes.
std::vector<SweepRow> sample_efficiency_sweep(const SweepOptions& opts);

std::string sweep_csv(const std::vector<SweepRow>& rows);

// Environment overrides for default configuration values (HEMIDEF_* keys).
double env_double(const char* name, double fallback);
int env_int(const char* name, int fallback);

// Applies HEMIDEF_FOV, HEMIDEF_RC, HEMIDEF_EPSILON, HEMIDEF_DT, HEMIDEF_NU,
// HEMIDEF_TMAX_FACTOR, HEMIDEF_NAF, HEMIDEF_NDF to freshly built defaults.
void apply_env_overrides(GameConfig& game, PerceptionConfig& perception);

} // namespace hemidef
