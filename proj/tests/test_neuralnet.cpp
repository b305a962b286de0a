#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "hemidef/neuralnet.hpp"
#include "hemidef/rng.hpp"

using namespace hemidef;

namespace {

Matrix random_matrix(Rng& rng, int r, int c, double scale = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data) v = uniform_range(rng, -scale, scale);
    return m;
}

// random symmetric 0/1 adjacency, zero diagonal
Matrix random_adjacency(Rng& rng, int n, double p = 0.4) {
    Matrix s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (uniform01(rng) < p) {
                s.at(i, j) = 1.0;
                s.at(j, i) = 1.0;
            }
    return s;
}

struct Problem {
    Matrix x, s, valid;
    std::vector<int> labels;
};

Problem random_problem(Rng& rng, const ModelParams& model, int n) {
    Problem pb;
    pb.x = random_matrix(rng, n, model.input_dim());
    pb.s = random_adjacency(rng, n);
    pb.valid = Matrix(n, model.n_af);
    pb.labels.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        int first = -1;
        for (int s = 0; s < model.n_af; ++s)
            if (uniform01(rng) < 0.6) {
                pb.valid.at(i, s) = 1.0;
                if (first < 0) first = s;
            }
        if (first >= 0 && uniform01(rng) < 0.8) {
            // uniform valid slot as the label
            std::vector<int> vs;
            for (int s = 0; s < model.n_af; ++s)
                if (pb.valid.at(i, s) != 0.0) vs.push_back(s);
            pb.labels[i] = vs[uniform_index(rng, vs.size())];
        }
    }
    return pb;
}

double loss_at(const ModelParams& model, const Problem& pb) {
    const Matrix logits = forward(model, pb.x, pb.s);
    return masked_softmax_xent(logits, pb.labels, pb.valid).loss;
}

// central-difference oracle over every entry of every parameter group
double max_grad_rel_error(ModelParams& model, const Problem& pb, const ParamSet& grads,
                          double h = 1e-5) {
    auto pv = model.p.views();
    auto gv = grads.views();
    double worst = 0.0;
    for (std::size_t a = 0; a < pv.size(); ++a) {
        for (std::size_t i = 0; i < pv[a]->data.size(); ++i) {
            const double keep = pv[a]->data[i];
            pv[a]->data[i] = keep + h;
            const double up = loss_at(model, pb);
            pv[a]->data[i] = keep - h;
            const double dn = loss_at(model, pb);
            pv[a]->data[i] = keep;
            const double fd = (up - dn) / (2.0 * h);
            const double an = gv[a]->data[i];
            const double rel = std::abs(fd - an) / std::max({1e-6, std::abs(fd), std::abs(an)});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

} // namespace

TEST_CASE("graph shift moves rows across an edge") {
    Matrix x(2, 2);
    x.at(0, 0) = 1.0; x.at(0, 1) = 2.0;
    x.at(1, 0) = 3.0; x.at(1, 1) = 4.0;
    Matrix s(2, 2);
    s.at(0, 1) = 1.0;
    s.at(1, 0) = 1.0;
    Matrix out(2, 2);
    matmul(s, x, out);
    CHECK(out.at(0, 0) == 3.0);
    CHECK(out.at(0, 1) == 4.0);
    CHECK(out.at(1, 0) == 1.0);
    CHECK(out.at(1, 1) == 2.0);
}

TEST_CASE("graph_conv_forward sums shifted terms") {
    Matrix x(2, 1);
    x.at(0, 0) = 1.0;
    x.at(1, 0) = 2.0;
    Matrix s(2, 2);
    s.at(0, 1) = 1.0;
    s.at(1, 0) = 1.0;
    std::vector<Matrix> bank(2, Matrix(1, 1));
    bank[0].at(0, 0) = 1.0;
    bank[1].at(0, 0) = 1.0;

    const Matrix y = graph_conv_forward(x, s, bank);
    CHECK(y.at(0, 0) == doctest::Approx(3.0));  // x0 + x1
    CHECK(y.at(1, 0) == doctest::Approx(3.0));

    // zero adjacency: output reduces to X * H_0 regardless of tap count
    Matrix z(2, 2);
    const Matrix y0 = graph_conv_forward(x, z, bank);
    CHECK(y0.at(0, 0) == doctest::Approx(1.0));
    CHECK(y0.at(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("forward with zero weights gives zero logits") {
    ModelParams model = init_params(1);
    for (Matrix* m : model.p.views()) m->zero();
    Rng rng = make_rng(2);
    Matrix x = random_matrix(rng, 3, model.input_dim());
    Matrix s = random_adjacency(rng, 3);
    const Matrix logits = forward(model, x, s);
    for (double v : logits.data) CHECK(v == 0.0);
}

TEST_CASE("single node output ignores the hop count") {
    ModelParams model = init_params(3);
    Rng rng = make_rng(4);
    Matrix x = random_matrix(rng, 1, model.input_dim());
    Matrix s(1, 1);
    const Matrix base = forward(model, x, s);

    ModelParams deep = init_params(3, ModelKind::gnn, 3);
    // reuse the K=1 taps for k=0,1 and zero the extra ones
    deep.p = model.p;
    deep.p.gc1.resize(4, Matrix(8, 32));
    deep.p.gc2.resize(4, Matrix(32, 128));
    const Matrix same = forward(deep, x, s);
    for (int j = 0; j < base.cols; ++j)
        CHECK(same.at(0, j) == doctest::Approx(base.at(0, j)));
}

TEST_CASE("permutation equivariance") {
    Rng rng = make_rng(5);
    ModelParams model = init_params(6);
    for (int it = 0; it < 50; ++it) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 7));
        Matrix x = random_matrix(rng, n, model.input_dim());
        Matrix s = random_adjacency(rng, n);

        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        for (std::size_t i = n; i > 1; --i)
            std::swap(perm[i - 1], perm[uniform_index(rng, i)]);

        Matrix px(n, x.cols), ps(n, n);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < x.cols; ++c) px.at(i, c) = x.at(perm[i], c);
            for (int j = 0; j < n; ++j) ps.at(i, j) = s.at(perm[i], perm[j]);
        }

        const Matrix out = forward(model, x, s);
        const Matrix pout = forward(model, px, ps);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < out.cols; ++c)
                worst = std::max(worst, std::abs(pout.at(i, c) - out.at(perm[i], c)));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("two graph layers see exactly two hops") {
    ModelParams model = init_params(7);
    Rng rng = make_rng(8);
    const int n = 6;  // path graph 0-1-2-3-4-5
    Matrix s(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        s.at(i, i + 1) = 1.0;
        s.at(i + 1, i) = 1.0;
    }
    Matrix x = random_matrix(rng, n, model.input_dim());
    const Matrix base = forward(model, x, s);

    // zero the features of nodes three or more hops from node 0
    Matrix x2 = x;
    for (int i = 3; i < n; ++i)
        for (int c = 0; c < x.cols; ++c) x2.at(i, c) = 0.0;
    const Matrix out = forward(model, x2, s);
    for (int c = 0; c < base.cols; ++c)
        CHECK(std::abs(out.at(0, c) - base.at(0, c)) < 1e-12);
    // sanity: the 2-hop neighbourhood does influence node 0
    Matrix x3 = x;
    for (int c = 0; c < x.cols; ++c) x3.at(2, c) += 1.0;
    const Matrix out3 = forward(model, x3, s);
    double delta = 0.0;
    for (int c = 0; c < base.cols; ++c) delta += std::abs(out3.at(0, c) - base.at(0, c));
    CHECK(delta > 0.0);
}

TEST_CASE("masked cross-entropy closed forms") {
    const int n_af = 10;
    Matrix logits(1, n_af);
    Matrix valid(1, n_af);
    for (int s = 0; s < n_af; ++s) valid.at(0, s) = 1.0;
    std::vector<int> labels{3};

    CHECK(masked_softmax_xent(logits, labels, valid).loss ==
          doctest::Approx(std::log(10.0)).epsilon(1e-12));

    Matrix peaked = logits;
    peaked.at(0, 3) = 30.0;
    CHECK(masked_softmax_xent(peaked, labels, valid).loss < 1e-9);

    Matrix valid4(1, n_af);
    for (int s = 0; s < 4; ++s) valid4.at(0, s) = 1.0;
    CHECK(masked_softmax_xent(logits, labels, valid4).loss ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));

    std::vector<int> bad{7};
    CHECK_THROWS_AS(masked_softmax_xent(logits, bad, valid4), std::invalid_argument);

    std::vector<int> unlabeled{-1};
    const LossResult none = masked_softmax_xent(logits, unlabeled, valid);
    CHECK(none.loss == 0.0);
    CHECK(none.labeled == 0);
    for (double v : none.dlogits.data) CHECK(v == 0.0);
}

TEST_CASE("masked slots never win the argmax") {
    Rng rng = make_rng(12);
    ModelParams model = init_params(13);
    for (int it = 0; it < 20; ++it) {
        const int n = 4;
        Problem pb = random_problem(rng, model, n);
        Matrix logits = forward(model, pb.x, pb.s);
        for (int i = 0; i < n; ++i) {
            // mask then argmax over everything must land on a valid slot
            int best = -1;
            double best_v = 0.0;
            bool any_valid = false;
            for (int s = 0; s < model.n_af; ++s) {
                const double z = logits.at(i, s) + (pb.valid.at(i, s) != 0.0 ? 0.0 : -1e9);
                if (best < 0 || z > best_v) {
                    best = s;
                    best_v = z;
                }
                any_valid = any_valid || pb.valid.at(i, s) != 0.0;
            }
            if (any_valid) CHECK(pb.valid.at(i, best) != 0.0);
        }
    }
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
    ModelParams model = init_params(21);
    Rng rng = make_rng(22);
    Matrix x = random_matrix(rng, 4, model.input_dim());
    Matrix s = random_adjacency(rng, 4);
    ForwardCache cache;
    forward(model, x, s, &cache);
    const BackwardResult bw = backward(model, s, cache, Matrix(4, model.n_af));
    for (const Matrix* g : bw.grads.views())
        for (double v : g->data) CHECK(v == 0.0);
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng = make_rng(31);
    for (int it = 0; it < 3; ++it) {
        ModelParams model = init_params(100 + it);
        const Problem pb = random_problem(rng, model, 4);

        ForwardCache cache;
        const Matrix logits = forward(model, pb.x, pb.s, &cache);
        const LossResult lr = masked_softmax_xent(logits, pb.labels, pb.valid);
        if (lr.labeled == 0) continue;
        const BackwardResult bw = backward(model, pb.s, cache, lr.dlogits);

        CHECK(max_grad_rel_error(model, pb, bw.grads) < 1e-4);
    }
}

TEST_CASE("input gradient matches central differences") {
    Rng rng = make_rng(41);
    ModelParams model = init_params(42);
    Problem pb = random_problem(rng, model, 4);
    ForwardCache cache;
    const Matrix logits = forward(model, pb.x, pb.s, &cache);
    const LossResult lr = masked_softmax_xent(logits, pb.labels, pb.valid);
    REQUIRE(lr.labeled > 0);
    const BackwardResult bw = backward(model, pb.s, cache, lr.dlogits);

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < pb.x.data.size(); ++i) {
        const double keep = pb.x.data[i];
        pb.x.data[i] = keep + h;
        const double up = loss_at(model, pb);
        pb.x.data[i] = keep - h;
        const double dn = loss_at(model, pb);
        pb.x.data[i] = keep;
        const double fd = (up - dn) / (2.0 * h);
        const double an = bw.dx.data[i];
        worst = std::max(worst,
                         std::abs(fd - an) / std::max({1e-6, std::abs(fd), std::abs(an)}));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("mlp variant ignores other nodes entirely") {
    ModelParams model = init_params(51, ModelKind::mlp);
    Rng rng = make_rng(52);
    Matrix x = random_matrix(rng, 3, model.input_dim());
    Matrix s = random_adjacency(rng, 3, 1.0);
    const Matrix base = forward(model, x, s);
    for (int c = 0; c < x.cols; ++c) x.at(2, c) = uniform_range(rng, -9.0, 9.0);
    const Matrix out = forward(model, x, s);
    for (int c = 0; c < base.cols; ++c) {
        CHECK(out.at(0, c) == base.at(0, c));
        CHECK(out.at(1, c) == base.at(1, c));
    }
}

TEST_CASE("adam first step and determinism") {
    ModelParams a = init_params(61);
    ModelParams b = init_params(61);
    AdamState sa = make_adam_state(a);
    AdamState sb = make_adam_state(b);

    // zero gradients leave parameters untouched
    adam_step(a, zero_grads(a), sa, 0.1);
    for (std::size_t g = 0; g < a.p.views().size(); ++g)
        CHECK(a.p.views()[g]->data == b.p.views()[g]->data);

    // closed-form first step on a unit gradient: -lr within epsilon rounding
    ParamSet ones = zero_grads(b);
    for (Matrix* m : ones.views())
        for (double& v : m->data) v = 1.0;
    const double w0 = b.p.w1.data[0];
    adam_step(b, ones, sb, 0.1);
    CHECK(b.p.w1.data[0] == doctest::Approx(w0 - 0.1).epsilon(1e-7));

    // identical updates on identical state are bitwise equal
    ModelParams c = init_params(61);
    ModelParams d = init_params(61);
    AdamState sc = make_adam_state(c);
    AdamState sd = make_adam_state(d);
    adam_step(c, ones, sc, 0.05);
    adam_step(d, ones, sd, 0.05);
    for (std::size_t g = 0; g < c.p.views().size(); ++g)
        CHECK(c.p.views()[g]->data == d.p.views()[g]->data);
}

TEST_CASE("cosine schedule endpoints are exact") {
    const LRSchedule sched;
    CHECK(cosine_lr(0, sched) == 5e-3);
    CHECK(cosine_lr(1500, sched) == 1e-6);
    CHECK(cosine_lr(750, sched) == doctest::Approx((5e-3 + 1e-6) / 2).epsilon(1e-12));
    CHECK_THROWS_AS(cosine_lr(-1, sched), std::invalid_argument);
    CHECK_THROWS_AS(cosine_lr(1501, sched), std::invalid_argument);
}

TEST_CASE("init_params is seed-deterministic with zero biases") {
    const ModelParams a = init_params(123);
    const ModelParams b = init_params(123);
    const ModelParams c = init_params(124);
    CHECK(a.p.w1.data == b.p.w1.data);
    CHECK(a.p.head_w.data == b.p.head_w.data);
    CHECK(a.p.w1.data != c.p.w1.data);
    for (double v : a.p.b1.data) CHECK(v == 0.0);
    for (double v : a.p.b2.data) CHECK(v == 0.0);
    for (double v : a.p.head_b.data) CHECK(v == 0.0);
}

TEST_CASE("checkpoint round trip preserves every parameter") {
    const ModelParams a = init_params(321, ModelKind::gnn, 2);
    const std::string text = checkpoint_to_json(a);
    const ModelParams b = checkpoint_from_json(text);
    CHECK(b.kind == ModelKind::gnn);
    CHECK(b.k_hops == 2);
    auto av = a.p.views();
    auto bv = b.p.views();
    REQUIRE(av.size() == bv.size());
    for (std::size_t i = 0; i < av.size(); ++i) CHECK(av[i]->data == bv[i]->data);

    // shape validation bites on corrupted documents
    std::string broken = text;
    const auto pos = broken.find("[39,16]");
    REQUIRE(pos != std::string::npos);
    broken.replace(pos, 7, "[16,39]");
    CHECK_THROWS(checkpoint_from_json(broken));
}
