#include "hemidef/datatrain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "hemidef/rng.hpp"

namespace hemidef {

namespace {

GraphSample snapshot_sample(const GameConfig& cfg, const PerceptionConfig& pcfg,
                            std::uint64_t seed, DatasetStats* stats) {
    const WorldState world = init_random(cfg, seed);
    const double R = cfg.radius();

    PolicyContext ctx;
    ctx.perception = pcfg;
    ctx.R = R;
    ctx.nu = cfg.nu;

    std::vector<LocalPerception> percepts;
    GraphSample gs;
    gs.n = cfg.n;
    gs.x = feature_matrix(world, pcfg, R, &percepts);
    gs.s = build_comm_graph(world.defenders, pcfg.r_c, R).s;
    gs.labels.assign(cfg.n, -1);
    gs.valid = Matrix(cfg.n, pcfg.n_af);
    for (int i = 0; i < cfg.n; ++i)
        for (int s = 0; s < pcfg.n_af; ++s)
            gs.valid.at(i, s) = percepts[i].intruder_mask[s] ? 1.0 : 0.0;

    const MatchingResult match = expert_matching(build_payoff_matrix(world, ctx));
    for (int i = 0; i < cfg.n; ++i) {
        const int j = match.assignment[i];
        if (j < 0) continue;
        int slot = -1;
        for (int s = 0; s < pcfg.n_af; ++s)
            if (percepts[i].intruder_ids[s] == j) {
                slot = s;
                break;
            }
        if (slot >= 0) gs.labels[i] = slot;
        else if (stats) ++stats->matched_outside_slots;
    }
    return gs;
}

} // namespace

std::vector<GraphSample> generate_dataset(int num_snapshots, const GameConfig& cfg,
                                          const PerceptionConfig& pcfg,
                                          std::uint64_t seed, DatasetStats* stats) {
    std::vector<GraphSample> samples(num_snapshots);
    std::vector<DatasetStats> local(num_snapshots);

#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < num_snapshots; ++idx)
        samples[idx] = snapshot_sample(cfg, pcfg, mix_seed(seed, idx),
                                       stats ? &local[idx] : nullptr);

    if (stats) {
        stats->snapshots += num_snapshots;
        stats->label_histogram.resize(pcfg.n_af, 0);
        for (int idx = 0; idx < num_snapshots; ++idx) {
            stats->matched_outside_slots += local[idx].matched_outside_slots;
            stats->nodes += samples[idx].n;
            for (int lab : samples[idx].labels)
                if (lab >= 0) {
                    ++stats->labeled;
                    ++stats->label_histogram[lab];
                }
        }
    }
    return samples;
}

DatasetSplit split_dataset(std::vector<GraphSample> samples, double train_frac,
                           double val_frac, std::uint64_t seed) {
    if (train_frac < 0 || val_frac < 0 || train_frac + val_frac > 1.0 + 1e-12)
        throw std::invalid_argument("split_dataset: bad fractions");
    Rng rng = make_rng(seed);
    // Fisher-Yates with our own uniform draw so the split is stable across
    // standard libraries
    for (std::size_t i = samples.size(); i > 1; --i)
        std::swap(samples[i - 1], samples[uniform_index(rng, i)]);

    const std::size_t n = samples.size();
    const std::size_t n_train = static_cast<std::size_t>(train_frac * n);
    const std::size_t n_val = static_cast<std::size_t>(val_frac * n);

    DatasetSplit out;
    out.train.assign(std::make_move_iterator(samples.begin()),
                     std::make_move_iterator(samples.begin() + n_train));
    out.val.assign(std::make_move_iterator(samples.begin() + n_train),
                   std::make_move_iterator(samples.begin() + n_train + n_val));
    out.test.assign(std::make_move_iterator(samples.begin() + n_train + n_val),
                    std::make_move_iterator(samples.end()));
    return out;
}

namespace {

struct SampleGrad {
    ParamSet grads;
    double loss_sum = 0.0;  // loss * labeled
    int labeled = 0;
    int correct = 0;
};

SampleGrad sample_gradient(const ModelParams& model, const GraphSample& gs) {
    SampleGrad sg;
    ForwardCache cache;
    const Matrix logits = forward(model, gs.x, gs.s, &cache);
    const LossResult lr = masked_softmax_xent(logits, gs.labels, gs.valid);
    sg.labeled = lr.labeled;
    sg.loss_sum = lr.loss * lr.labeled;
    if (lr.labeled == 0) {
        sg.grads = zero_grads(model);
        return sg;
    }
    // un-normalize: keep sum-gradients so the batch can average over its own
    // labeled-node count
    Matrix dlogits = lr.dlogits;
    for (double& v : dlogits.data) v *= lr.labeled;
    sg.grads = backward(model, gs.s, cache, dlogits).grads;

    for (int i = 0; i < logits.rows; ++i) {
        if (gs.labels[i] < 0) continue;
        int best = -1;
        for (int s = 0; s < logits.cols; ++s) {
            if (gs.valid.at(i, s) == 0.0) continue;
            if (best < 0 || logits.at(i, s) > logits.at(i, best)) best = s;
        }
        if (best == gs.labels[i]) ++sg.correct;
    }
    return sg;
}

void scale_params(ParamSet& ps, double a) {
    for (Matrix* m : ps.views())
        for (double& v : m->data) v *= a;
}

void add_params(ParamSet& dst, const ParamSet& src) {
    auto dv = dst.views();
    auto sv = src.views();
    for (std::size_t i = 0; i < dv.size(); ++i) axpy(1.0, *sv[i], *dv[i]);
}

} // namespace

std::pair<double, double> evaluate_dataset(const ModelParams& model,
                                           const std::vector<GraphSample>& samples) {
    double loss_sum = 0.0;
    long labeled = 0, correct = 0;
    std::vector<SampleGrad> evals(samples.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
        const GraphSample& gs = samples[i];
        SampleGrad sg;
        const Matrix logits = forward(model, gs.x, gs.s);
        const LossResult lr = masked_softmax_xent(logits, gs.labels, gs.valid);
        sg.labeled = lr.labeled;
        sg.loss_sum = lr.loss * lr.labeled;
        for (int r = 0; r < logits.rows; ++r) {
            if (gs.labels[r] < 0) continue;
            int best = -1;
            for (int s = 0; s < logits.cols; ++s) {
                if (gs.valid.at(r, s) == 0.0) continue;
                if (best < 0 || logits.at(r, s) > logits.at(r, best)) best = s;
            }
            if (best == gs.labels[r]) ++sg.correct;
        }
        evals[i] = std::move(sg);
    }
    for (const SampleGrad& sg : evals) {
        loss_sum += sg.loss_sum;
        labeled += sg.labeled;
        correct += sg.correct;
    }
    if (labeled == 0) return {0.0, 0.0};
    return {loss_sum / labeled, static_cast<double>(correct) / labeled};
}

TrainHistory train(ModelParams& model, const DatasetSplit& split, const TrainOptions& opts) {
    TrainHistory hist;
    if (split.train.empty()) return hist;

    LRSchedule sched = opts.schedule;
    sched.total_epochs = opts.epochs;

    AdamState adam = make_adam_state(model);
    Rng shuffle_rng = make_rng(mix_seed(opts.seed, 0xB5u));

    std::vector<int> order(split.train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        const double lr = cosine_lr(epoch, sched);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[uniform_index(shuffle_rng, i)]);

        double epoch_loss_sum = 0.0;
        long epoch_labeled = 0, epoch_correct = 0;

        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(opts.batch)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(opts.batch));
            std::vector<SampleGrad> grads(stop - start);

            if (opts.parallel_batch) {
#pragma omp parallel for schedule(dynamic)
                for (int b = 0; b < static_cast<int>(stop - start); ++b)
                    grads[b] = sample_gradient(model, split.train[order[start + b]]);
            } else {
                for (std::size_t b = 0; b < stop - start; ++b)
                    grads[b] = sample_gradient(model, split.train[order[start + b]]);
            }

            // fixed-order reduction keeps training bit-reproducible
            ParamSet total = zero_grads(model);
            long batch_labeled = 0;
            for (const SampleGrad& sg : grads) {
                if (sg.labeled == 0) continue;
                add_params(total, sg.grads);
                batch_labeled += sg.labeled;
                epoch_loss_sum += sg.loss_sum;
                epoch_correct += sg.correct;
            }
            epoch_labeled += batch_labeled;
            if (batch_labeled == 0) continue;
            scale_params(total, 1.0 / batch_labeled);
            adam_step(model, total, adam, lr);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.lr = lr;
        rec.train_loss = epoch_labeled ? epoch_loss_sum / epoch_labeled : 0.0;
        rec.train_acc =
            epoch_labeled ? static_cast<double>(epoch_correct) / epoch_labeled : 0.0;
        if (!split.val.empty()) {
            const auto [vl, va] = evaluate_dataset(model, split.val);
            rec.val_loss = vl;
            rec.val_acc = va;
        }
        hist.epochs.push_back(rec);

        if (opts.early_stop_train_acc > 0.0 && rec.train_acc >= opts.early_stop_train_acc)
            break;
    }
    return hist;
}

namespace {

using nlohmann::json;

json sample_to_json(const GraphSample& gs) {
    json jx = json::array();
    for (int i = 0; i < gs.x.rows; ++i)
        jx.push_back(std::vector<double>(gs.x.row(i), gs.x.row(i) + gs.x.cols));

    // adjacency stored as neighbor-index lists
    json js = json::array();
    for (int i = 0; i < gs.s.rows; ++i) {
        json nbrs = json::array();
        for (int j = 0; j < gs.s.cols; ++j)
            if (gs.s.at(i, j) != 0.0) nbrs.push_back(j);
        js.push_back(std::move(nbrs));
    }

    json jl = json::array();
    for (int lab : gs.labels)
        jl.push_back(lab < 0 ? json(nullptr) : json(lab));

    json jv = json::array();
    for (int i = 0; i < gs.valid.rows; ++i) {
        json row = json::array();
        for (int s = 0; s < gs.valid.cols; ++s)
            row.push_back(gs.valid.at(i, s) != 0.0 ? 1 : 0);
        jv.push_back(std::move(row));
    }

    return json{{"n", gs.n}, {"x", std::move(jx)}, {"s", std::move(js)},
                {"labels", std::move(jl)}, {"valid", std::move(jv)}};
}

GraphSample sample_from_json(const json& doc) {
    GraphSample gs;
    gs.n = doc.at("n").get<int>();
    const auto& jx = doc.at("x");
    if (static_cast<int>(jx.size()) != gs.n)
        throw std::runtime_error("feature row count mismatch");
    const int cols = gs.n > 0 ? static_cast<int>(jx.at(0).size()) : 0;
    gs.x = Matrix(gs.n, cols);
    for (int i = 0; i < gs.n; ++i)
        for (int c = 0; c < cols; ++c) gs.x.at(i, c) = jx.at(i).at(c).get<double>();

    gs.s = Matrix(gs.n, gs.n);
    const auto& js = doc.at("s");
    for (int i = 0; i < gs.n; ++i)
        for (const auto& j : js.at(i)) gs.s.at(i, j.get<int>()) = 1.0;

    for (const auto& l : doc.at("labels"))
        gs.labels.push_back(l.is_null() ? -1 : l.get<int>());

    const auto& jv = doc.at("valid");
    const int n_af = gs.n > 0 ? static_cast<int>(jv.at(0).size()) : 0;
    gs.valid = Matrix(gs.n, n_af);
    for (int i = 0; i < gs.n; ++i)
        for (int s = 0; s < n_af; ++s) gs.valid.at(i, s) = jv.at(i).at(s).get<int>();
    return gs;
}

} // namespace

void save_dataset(const std::vector<GraphSample>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
    for (const GraphSample& gs : samples) out << sample_to_json(gs).dump() << "\n";
}

std::vector<GraphSample> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
    std::vector<GraphSample> samples;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            samples.push_back(sample_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error("load_dataset: parse error at line " +
                                     std::to_string(line_no) + ": " + e.what());
        }
    }
    return samples;
}

} // namespace hemidef
