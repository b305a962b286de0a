#include "hemidef/neuralnet.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hemidef/geometry.hpp"
#include "hemidef/rng.hpp"

namespace hemidef {

namespace {

constexpr int kDense1 = 16;
constexpr int kDense2 = 8;
constexpr int kGraph1 = 32;
constexpr int kGraph2 = 128;
constexpr double kMaskPenalty = -1e9;

} // namespace

std::vector<Matrix*> ParamSet::views() {
    std::vector<Matrix*> v{&w1, &b1, &w2, &b2};
    for (auto& h : gc1) v.push_back(&h);
    for (auto& h : gc2) v.push_back(&h);
    v.push_back(&head_w);
    v.push_back(&head_b);
    return v;
}

std::vector<const Matrix*> ParamSet::views() const {
    std::vector<const Matrix*> v{&w1, &b1, &w2, &b2};
    for (const auto& h : gc1) v.push_back(&h);
    for (const auto& h : gc2) v.push_back(&h);
    v.push_back(&head_w);
    v.push_back(&head_b);
    return v;
}

Matrix graph_conv_forward(const Matrix& X, const Matrix& S,
                          const std::vector<Matrix>& bank,
                          std::vector<Matrix>* shifted) {
    if (bank.empty()) throw std::invalid_argument("graph_conv_forward: empty filter bank");
    if (S.rows != X.rows || S.cols != X.rows)
        throw std::invalid_argument("graph_conv_forward: adjacency shape mismatch");

    Matrix out(X.rows, bank[0].cols);
    Matrix term(X.rows, bank[0].cols);
    Matrix cur = X;  // S^0 X
    if (shifted) shifted->clear();
    for (std::size_t k = 0; k < bank.size(); ++k) {
        if (k > 0) {
            Matrix next(cur.rows, cur.cols);
            matmul(S, cur, next);  // S^k X from S^(k-1) X
            cur = std::move(next);
        }
        if (shifted) shifted->push_back(cur);
        matmul(cur, bank[k], term);
        axpy(1.0, term, out);
    }
    return out;
}

Matrix forward(const ModelParams& model, const Matrix& X, const Matrix& S,
               ForwardCache* cache) {
    if (X.cols != model.input_dim())
        throw std::invalid_argument("forward: feature width mismatch");
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.x = X;

    c.h1 = Matrix(X.rows, model.p.w1.cols);
    matmul(X, model.p.w1, c.h1);
    add_row_bias(c.h1, model.p.b1);
    relu_inplace(c.h1);

    c.h2 = Matrix(X.rows, model.p.w2.cols);
    matmul(c.h1, model.p.w2, c.h2);
    add_row_bias(c.h2, model.p.b2);
    relu_inplace(c.h2);

    const Matrix* head_in = &c.h2;
    if (model.kind == ModelKind::gnn) {
        c.g1 = graph_conv_forward(c.h2, S, model.p.gc1, &c.shifted1);
        relu_inplace(c.g1);
        c.g2 = graph_conv_forward(c.g1, S, model.p.gc2, &c.shifted2);
        relu_inplace(c.g2);
        head_in = &c.g2;
    }

    c.logits = Matrix(X.rows, model.p.head_w.cols);
    matmul(*head_in, model.p.head_w, c.logits);
    add_row_bias(c.logits, model.p.head_b);
    return c.logits;
}

LossResult masked_softmax_xent(const Matrix& logits, const std::vector<int>& labels,
                               const Matrix& valid) {
    if (static_cast<int>(labels.size()) != logits.rows || !valid.same_shape(logits))
        throw std::invalid_argument("masked_softmax_xent: shape mismatch");

    LossResult res;
    res.dlogits = Matrix(logits.rows, logits.cols);
    for (int i = 0; i < logits.rows; ++i)
        if (labels[i] >= 0) ++res.labeled;
    if (res.labeled == 0) return res;

    double total = 0.0;
    const double inv = 1.0 / res.labeled;
    std::vector<double> prob(logits.cols);
    for (int i = 0; i < logits.rows; ++i) {
        if (labels[i] < 0) continue;
        if (labels[i] >= logits.cols || valid.at(i, labels[i]) == 0.0)
            throw std::invalid_argument("masked_softmax_xent: label on invalid slot");

        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < logits.cols; ++j) {
            const double z = logits.at(i, j) + (valid.at(i, j) != 0.0 ? 0.0 : kMaskPenalty);
            prob[j] = z;
            if (z > mx) mx = z;
        }
        double denom = 0.0;
        for (int j = 0; j < logits.cols; ++j) {
            prob[j] = std::exp(prob[j] - mx);
            denom += prob[j];
        }
        for (int j = 0; j < logits.cols; ++j) prob[j] /= denom;

        total -= std::log(std::max(prob[labels[i]], 1e-300));
        for (int j = 0; j < logits.cols; ++j)
            res.dlogits.at(i, j) = (prob[j] - (j == labels[i] ? 1.0 : 0.0)) * inv;
    }
    res.loss = total * inv;
    return res;
}

namespace {

// dX = sum_k (S^T)^k dY H_k^T; dH_k = (S^k X)^T dY
void graph_conv_backward(const Matrix& S, const std::vector<Matrix>& bank,
                         const std::vector<Matrix>& shifted, const Matrix& dY,
                         std::vector<Matrix>& dbank, Matrix& dX) {
    dX = Matrix(dY.rows, bank[0].rows);
    Matrix termX(dY.rows, bank[0].rows);
    const Matrix St = transpose(S);
    Matrix cur = dY;  // (S^T)^k dY
    for (std::size_t k = 0; k < bank.size(); ++k) {
        if (k > 0) {
            Matrix next(cur.rows, cur.cols);
            matmul(St, cur, next);
            cur = std::move(next);
        }
        matmul_at_b(shifted[k], dY, dbank[k]);
        matmul_a_bt(cur, bank[k], termX);
        axpy(1.0, termX, dX);
    }
}

} // namespace

BackwardResult backward(const ModelParams& model, const Matrix& S,
                        const ForwardCache& cache, const Matrix& dlogits) {
    BackwardResult out;
    out.grads = zero_grads(model);
    ParamSet& g = out.grads;

    const Matrix& head_in = model.kind == ModelKind::gnn ? cache.g2 : cache.h2;
    matmul_at_b(head_in, dlogits, g.head_w);
    col_sum(dlogits, g.head_b);

    Matrix d_head_in(head_in.rows, head_in.cols);
    matmul_a_bt(dlogits, model.p.head_w, d_head_in);

    Matrix dh2;
    if (model.kind == ModelKind::gnn) {
        Matrix dg2 = std::move(d_head_in);
        relu_backward_inplace(dg2, cache.g2);

        Matrix dg1;
        graph_conv_backward(S, model.p.gc2, cache.shifted2, dg2, g.gc2, dg1);
        relu_backward_inplace(dg1, cache.g1);

        graph_conv_backward(S, model.p.gc1, cache.shifted1, dg1, g.gc1, dh2);
    } else {
        dh2 = std::move(d_head_in);
    }
    relu_backward_inplace(dh2, cache.h2);

    matmul_at_b(cache.h1, dh2, g.w2);
    col_sum(dh2, g.b2);

    Matrix dh1(cache.h1.rows, cache.h1.cols);
    matmul_a_bt(dh2, model.p.w2, dh1);
    relu_backward_inplace(dh1, cache.h1);

    matmul_at_b(cache.x, dh1, g.w1);
    col_sum(dh1, g.b1);

    out.dx = Matrix(cache.x.rows, cache.x.cols);
    matmul_a_bt(dh1, model.p.w1, out.dx);
    return out;
}

AdamState make_adam_state(const ModelParams& params) {
    AdamState st;
    for (const Matrix* p : params.p.views()) {
        st.m.emplace_back(p->rows, p->cols);
        st.v.emplace_back(p->rows, p->cols);
    }
    return st;
}

void adam_step(ModelParams& params, const ParamSet& grads, AdamState& state, double lr) {
    auto pv = params.p.views();
    auto gv = grads.views();
    if (pv.size() != gv.size() || pv.size() != state.m.size())
        throw std::invalid_argument("adam_step: parameter/gradient mismatch");

    state.step += 1;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t a = 0; a < pv.size(); ++a) {
        Matrix& p = *pv[a];
        const Matrix& gm = *gv[a];
        Matrix& m = state.m[a];
        Matrix& v = state.v[a];
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const double gi = gm.data[i];
            m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * gi;
            v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * gi * gi;
            const double mhat = m.data[i] / c1;
            const double vhat = v.data[i] / c2;
            p.data[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
}

double cosine_lr(int epoch, const LRSchedule& sched) {
    if (epoch < 0 || epoch > sched.total_epochs)
        throw std::invalid_argument("cosine_lr: epoch outside the schedule");
    const double w = 0.5 * (1.0 + std::cos(kPi * (static_cast<double>(epoch) /
                                                  sched.total_epochs)));
    // convex blend is exact at both endpoints
    return w * sched.lr_max + (1.0 - w) * sched.lr_min;
}

namespace {

Matrix glorot(Rng& rng, int fan_in, int fan_out) {
    Matrix w(fan_in, fan_out);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : w.data) v = uniform_range(rng, -limit, limit);
    return w;
}

} // namespace

ModelParams init_params(std::uint64_t seed, ModelKind kind, int k_hops, int n_af, int n_df) {
    ModelParams mp;
    mp.kind = kind;
    mp.k_hops = k_hops;
    mp.n_af = n_af;
    mp.n_df = n_df;
    mp.seed = seed;

    Rng rng = make_rng(seed);
    const int in = mp.input_dim();
    mp.p.w1 = glorot(rng, in, kDense1);
    mp.p.b1 = Matrix(1, kDense1);
    mp.p.w2 = glorot(rng, kDense1, kDense2);
    mp.p.b2 = Matrix(1, kDense2);
    if (kind == ModelKind::gnn) {
        for (int k = 0; k <= k_hops; ++k) mp.p.gc1.push_back(glorot(rng, kDense2, kGraph1));
        for (int k = 0; k <= k_hops; ++k) mp.p.gc2.push_back(glorot(rng, kGraph1, kGraph2));
        mp.p.head_w = glorot(rng, kGraph2, n_af);
    } else {
        mp.p.head_w = glorot(rng, kDense2, n_af);
    }
    mp.p.head_b = Matrix(1, n_af);
    return mp;
}

ParamSet zero_grads(const ModelParams& params) {
    ParamSet g;
    g.w1 = Matrix(params.p.w1.rows, params.p.w1.cols);
    g.b1 = Matrix(1, params.p.b1.cols);
    g.w2 = Matrix(params.p.w2.rows, params.p.w2.cols);
    g.b2 = Matrix(1, params.p.b2.cols);
    for (const auto& h : params.p.gc1) g.gc1.emplace_back(h.rows, h.cols);
    for (const auto& h : params.p.gc2) g.gc2.emplace_back(h.rows, h.cols);
    g.head_w = Matrix(params.p.head_w.rows, params.p.head_w.cols);
    g.head_b = Matrix(1, params.p.head_b.cols);
    return g;
}

namespace {

using nlohmann::json;

json matrix_to_json(const std::string& name, const Matrix& m) {
    return json{{"name", name}, {"shape", {m.rows, m.cols}}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j, int want_rows, int want_cols) {
    const auto shape = j.at("shape");
    const int r = shape.at(0).get<int>();
    const int c = shape.at(1).get<int>();
    if (r != want_rows || c != want_cols)
        throw std::runtime_error("checkpoint: shape mismatch for " +
                                 j.at("name").get<std::string>());
    Matrix m(r, c);
    const auto& data = j.at("data");
    if (static_cast<int>(data.size()) != r * c)
        throw std::runtime_error("checkpoint: data length mismatch for " +
                                 j.at("name").get<std::string>());
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = data.at(i).get<double>();
    return m;
}

} // namespace

std::string checkpoint_to_json(const ModelParams& mp) {
    json doc;
    doc["format_version"] = 1;
    doc["hyperparams"] = {
        {"kind", mp.kind == ModelKind::gnn ? "gnn" : "mlp"},
        {"k_hops", mp.k_hops},
        {"n_af", mp.n_af},
        {"n_df", mp.n_df},
        {"seed", mp.seed},
        {"dense", {kDense1, kDense2}},
        {"graph", {kGraph1, kGraph2}},
    };
    json params = json::array();
    params.push_back(matrix_to_json("w1", mp.p.w1));
    params.push_back(matrix_to_json("b1", mp.p.b1));
    params.push_back(matrix_to_json("w2", mp.p.w2));
    params.push_back(matrix_to_json("b2", mp.p.b2));
    for (std::size_t k = 0; k < mp.p.gc1.size(); ++k)
        params.push_back(matrix_to_json("gc1.h" + std::to_string(k), mp.p.gc1[k]));
    for (std::size_t k = 0; k < mp.p.gc2.size(); ++k)
        params.push_back(matrix_to_json("gc2.h" + std::to_string(k), mp.p.gc2[k]));
    params.push_back(matrix_to_json("head_w", mp.p.head_w));
    params.push_back(matrix_to_json("head_b", mp.p.head_b));
    doc["params"] = std::move(params);
    return doc.dump();
}

ModelParams checkpoint_from_json(const std::string& text) {
    const json doc = json::parse(text);
    if (doc.at("format_version").get<int>() != 1)
        throw std::runtime_error("checkpoint: unsupported format version");
    const auto& hp = doc.at("hyperparams");
    const std::string kind = hp.at("kind").get<std::string>();
    ModelParams mp = init_params(hp.at("seed").get<std::uint64_t>(),
                                 kind == "gnn" ? ModelKind::gnn : ModelKind::mlp,
                                 hp.at("k_hops").get<int>(), hp.at("n_af").get<int>(),
                                 hp.at("n_df").get<int>());

    const auto& params = doc.at("params");
    std::size_t idx = 0;
    auto next = [&](Matrix& dst) {
        if (idx >= params.size()) throw std::runtime_error("checkpoint: missing parameter");
        dst = matrix_from_json(params.at(idx), dst.rows, dst.cols);
        ++idx;
    };
    next(mp.p.w1);
    next(mp.p.b1);
    next(mp.p.w2);
    next(mp.p.b2);
    for (auto& h : mp.p.gc1) next(h);
    for (auto& h : mp.p.gc2) next(h);
    next(mp.p.head_w);
    next(mp.p.head_b);
    if (idx != params.size()) throw std::runtime_error("checkpoint: extra parameters");
    return mp;
}

void save_checkpoint(const ModelParams& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out << checkpoint_to_json(params) << "\n";
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_json(ss.str());
}

} // namespace hemidef
