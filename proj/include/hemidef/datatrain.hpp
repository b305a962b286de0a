#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hemidef/neuralnet.hpp"
#include "hemidef/simulator.hpp"

namespace hemidef {

// One training snapshot: the whole team's features and graph, with expert
// labels on the defenders whose matched intruder sits among their feature
// slots. Unlabeled nodes still take part in message passing.
struct GraphSample {
    int n = 0;
    Matrix x;                   // n x 39, frozen perception layout
    Matrix s;                   // n x n adjacency
    std::vector<int> labels;    // slot index per node, -1 when unlabeled
    Matrix valid;               // n x n_af slot mask
};

struct DatasetStats {
    long snapshots = 0;
    long nodes = 0;
    long labeled = 0;
    long matched_outside_slots = 0;  // expert match not among the 10 closest visible
    std::vector<long> label_histogram;
};

std::vector<GraphSample> generate_dataset(int num_snapshots, const GameConfig& cfg,
                                          const PerceptionConfig& pcfg,
                                          std::uint64_t seed,
                                          DatasetStats* stats = nullptr);

struct DatasetSplit {
    std::vector<GraphSample> train, val, test;
};

// Seeded shuffle, contiguous 60/20/20 cut (floor train, floor val, rest test).
DatasetSplit split_dataset(std::vector<GraphSample> samples, double train_frac,
                           double val_frac, std::uint64_t seed);

struct TrainOptions {
    int epochs = 1500;
    int batch = 64;
    LRSchedule schedule;        // total_epochs is forced to `epochs`
    std::uint64_t seed = 0;
    bool parallel_batch = false;  // per-sample gradients in parallel, reduced in sample order
    double early_stop_train_acc = -1.0;  // stop once train agreement reaches this, if > 0
};

struct EpochRecord {
    int epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

// Cross-entropy over expert labels, minibatch Adam with cosine annealing.
// Gradients are averaged over the labeled nodes of each batch and reduced in
// a fixed sample order, so reruns are bit-identical for a given seed.
TrainHistory train(ModelParams& model, const DatasetSplit& split, const TrainOptions& opts);

// Mean loss / top-1 agreement of the model on a sample set.
std::pair<double, double> evaluate_dataset(const ModelParams& model,
                                           const std::vector<GraphSample>& samples);

// Line-delimited JSON, one sample per line; round-trip is lossless.
void save_dataset(const std::vector<GraphSample>& samples, const std::string& path);
std::vector<GraphSample> load_dataset(const std::string& path);

} // namespace hemidef
