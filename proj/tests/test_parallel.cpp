#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hemidef/datatrain.hpp"
#include "hemidef/harness.hpp"
#include "hemidef/linalg.hpp"
#include "hemidef/rng.hpp"

using namespace hemidef;

namespace {

Matrix random_matrix(Rng& rng, int r, int c) {
    Matrix m(r, c);
    for (double& v : m.data) v = uniform_range(rng, -2.0, 2.0);
    return m;
}

} // namespace

TEST_CASE("parallel matmul is bitwise identical to the serial reference") {
    Rng rng = make_rng(1);
    for (const auto [m, k, n] : {std::tuple{3, 4, 5}, {64, 64, 64}, {257, 129, 63},
                                 {1, 100, 1}, {128, 8, 512}}) {
        const Matrix A = random_matrix(rng, m, k);
        const Matrix B = random_matrix(rng, k, n);
        Matrix C1(m, n), C2(m, n);
        matmul_serial(A, B, C1);
        matmul(A, B, C2);
        CHECK(C1.data == C2.data);
    }
}

TEST_CASE("transpose kernels agree with the reference composition") {
    Rng rng = make_rng(2);
    const Matrix A = random_matrix(rng, 17, 9);
    const Matrix B = random_matrix(rng, 17, 13);
    Matrix atb(9, 13);
    matmul_at_b(A, B, atb);
    Matrix ref(9, 13);
    matmul_serial(transpose(A), B, ref);
    for (std::size_t i = 0; i < ref.data.size(); ++i)
        CHECK(atb.data[i] == doctest::Approx(ref.data[i]).epsilon(1e-13));

    const Matrix C = random_matrix(rng, 9, 17);
    Matrix abt(9, 9);
    matmul_a_bt(C, transpose(transpose(C)), abt);  // C * C^T
    Matrix ref2(9, 9);
    matmul_serial(C, transpose(C), ref2);
    for (std::size_t i = 0; i < ref2.data.size(); ++i)
        CHECK(abt.data[i] == doctest::Approx(ref2.data[i]).epsilon(1e-13));
}

TEST_CASE("dataset generation does not depend on the thread count") {
    GameConfig cfg;
    cfg.n = 6;
    PerceptionConfig pcfg;
#ifdef _OPENMP
    const int keep = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    const auto serial = generate_dataset(16, cfg, pcfg, 99);
#ifdef _OPENMP
    omp_set_num_threads(keep);
#endif
    const auto parallel = generate_dataset(16, cfg, pcfg, 99);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].x.data == parallel[i].x.data);
        CHECK(serial[i].s.data == parallel[i].s.data);
        CHECK(serial[i].labels == parallel[i].labels);
    }
}

TEST_CASE("experiment trials do not depend on the thread count") {
    ExperimentSpec spec;
    spec.team_sizes = {4};
    spec.policies = {PolicyKind::greedy, PolicyKind::random};
    spec.trials = 4;
    spec.base_seed = 21;
#ifdef _OPENMP
    const int keep = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    const ExperimentResult serial = run_experiment(spec);
#ifdef _OPENMP
    omp_set_num_threads(keep);
#endif
    const ExperimentResult parallel = run_experiment(spec);
    CHECK(experiment_csv(serial) == experiment_csv(parallel));
}
