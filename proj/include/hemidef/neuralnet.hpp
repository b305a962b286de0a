#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hemidef/linalg.hpp"

namespace hemidef {

// gnn: dense 39->16->8, two graph-conv layers 8->32->128, head 128->10.
// mlp: the same dense stack with the graph layers removed, head 8->10.
enum class ModelKind { gnn, mlp };

// Learnable tensors. The same struct carries gradients, so shapes always
// mirror parameters by construction.
struct ParamSet {
    Matrix w1, b1;                 // dense 39->16
    Matrix w2, b2;                 // dense 16->8
    std::vector<Matrix> gc1, gc2;  // graph filter taps H_0..H_K per layer
    Matrix head_w, head_b;

    std::vector<Matrix*> views();
    std::vector<const Matrix*> views() const;
};

struct ModelParams {
    ModelKind kind = ModelKind::gnn;
    int k_hops = 1;   // taps per graph layer are k_hops + 1
    int n_af = 10;    // candidate slots (head width)
    int n_df = 3;
    std::uint64_t seed = 0;
    ParamSet p;

    int input_dim() const { return 3 * (n_af + n_df); }
};

// Per-parameter first/second moment accumulators.
struct AdamState {
    std::vector<Matrix> m, v;
    long step = 0;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct LRSchedule {
    double lr_max = 5e-3;
    double lr_min = 1e-6;
    int total_epochs = 1500;
};

// Activations retained for the backward pass.
struct ForwardCache {
    Matrix x;                          // input N x 39
    Matrix h1, h2;                     // rectified dense outputs
    std::vector<Matrix> shifted1;      // S^k * h2, k = 0..K
    Matrix g1;                         // rectified first graph layer
    std::vector<Matrix> shifted2;      // S^k * g1
    Matrix g2;                         // rectified second graph layer
    Matrix logits;
};

// Y = sum_k S^k X H_k, the shifted sums computed iteratively. If `shifted`
// is non-null the S^k X terms are stored there for the backward pass.
Matrix graph_conv_forward(const Matrix& X, const Matrix& S,
                          const std::vector<Matrix>& bank,
                          std::vector<Matrix>* shifted = nullptr);

// Per-node logits over the n_af candidate slots.
Matrix forward(const ModelParams& model, const Matrix& X, const Matrix& S,
               ForwardCache* cache = nullptr);

struct LossResult {
    double loss = 0.0;       // mean cross-entropy over labeled rows
    int labeled = 0;
    Matrix dlogits;          // gradient of (sum over labeled rows) / labeled
};

// Masked softmax cross-entropy. labels[i] is a slot index or -1 (unlabeled);
// valid is an N x n_af 0/1 mask; invalid slots get a -1e9 additive mask.
// Throws if a label lands on an invalid slot.
LossResult masked_softmax_xent(const Matrix& logits, const std::vector<int>& labels,
                               const Matrix& valid);

struct BackwardResult {
    ParamSet grads;
    Matrix dx;  // gradient with respect to the input features
};

BackwardResult backward(const ModelParams& model, const Matrix& S,
                        const ForwardCache& cache, const Matrix& dlogits);

// Standard bias-corrected Adam update, in place.
void adam_step(ModelParams& params, const ParamSet& grads, AdamState& state, double lr);

AdamState make_adam_state(const ModelParams& params);

// Cosine annealing between lr_max (epoch 0) and lr_min (total_epochs),
// exact at both endpoints.
double cosine_lr(int epoch, const LRSchedule& sched);

// Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases, reproducible
// from the seed.
ModelParams init_params(std::uint64_t seed, ModelKind kind = ModelKind::gnn,
                        int k_hops = 1, int n_af = 10, int n_df = 3);

ParamSet zero_grads(const ModelParams& params);

// Checkpoint: one JSON document holding hyperparameters and flat parameter
// arrays with shapes. Loading validates every shape.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

std::string checkpoint_to_json(const ModelParams& params);
ModelParams checkpoint_from_json(const std::string& text);

} // namespace hemidef
