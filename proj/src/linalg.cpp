#include "hemidef/linalg.hpp"

#include <cassert>
#include <stdexcept>

namespace hemidef {

namespace {

void check_mul(const Matrix& A, const Matrix& B, const Matrix& C, int m, int k, int n) {
    if (A.rows * A.cols == 0 || B.rows * B.cols == 0)
        throw std::invalid_argument("matmul: empty operand");
    if (A.cols != k || B.rows != k || C.rows != m || C.cols != n)
        throw std::invalid_argument("matmul: shape mismatch");
}

inline void mul_row(const Matrix& A, const Matrix& B, Matrix& C, int i) {
    double* ci = C.row(i);
    for (int j = 0; j < C.cols; ++j) ci[j] = 0.0;
    const double* ai = A.row(i);
    for (int k = 0; k < A.cols; ++k) {
        const double a = ai[k];
        if (a == 0.0) continue;
        const double* bk = B.row(k);
        for (int j = 0; j < C.cols; ++j) ci[j] += a * bk[j];
    }
}

} // namespace

void matmul_serial(const Matrix& A, const Matrix& B, Matrix& C) {
    check_mul(A, B, C, A.rows, A.cols, B.cols);
    for (int i = 0; i < A.rows; ++i) mul_row(A, B, C, i);
}

void matmul(const Matrix& A, const Matrix& B, Matrix& C) {
    check_mul(A, B, C, A.rows, A.cols, B.cols);
    const long work = static_cast<long>(A.rows) * A.cols * B.cols;
#pragma omp parallel for schedule(static) if (work > 32768)
    for (int i = 0; i < A.rows; ++i) mul_row(A, B, C, i);
}

void matmul_at_b(const Matrix& A, const Matrix& B, Matrix& C) {
    if (A.rows != B.rows || C.rows != A.cols || C.cols != B.cols)
        throw std::invalid_argument("matmul_at_b: shape mismatch");
    C.zero();
    for (int k = 0; k < A.rows; ++k) {
        const double* ak = A.row(k);
        const double* bk = B.row(k);
        for (int i = 0; i < A.cols; ++i) {
            const double a = ak[i];
            if (a == 0.0) continue;
            double* ci = C.row(i);
            for (int j = 0; j < B.cols; ++j) ci[j] += a * bk[j];
        }
    }
}

void matmul_a_bt(const Matrix& A, const Matrix& B, Matrix& C) {
    if (A.cols != B.cols || C.rows != A.rows || C.cols != B.rows)
        throw std::invalid_argument("matmul_a_bt: shape mismatch");
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.row(i);
        double* ci = C.row(i);
        for (int j = 0; j < B.rows; ++j) {
            const double* bj = B.row(j);
            double acc = 0.0;
            for (int k = 0; k < A.cols; ++k) acc += ai[k] * bj[k];
            ci[j] = acc;
        }
    }
}

Matrix multiply(const Matrix& A, const Matrix& B) {
    Matrix C(A.rows, B.cols);
    matmul(A, B, C);
    return C;
}

void add_row_bias(Matrix& Y, const Matrix& b) {
    assert(b.rows == 1 && b.cols == Y.cols);
    for (int i = 0; i < Y.rows; ++i) {
        double* yi = Y.row(i);
        for (int j = 0; j < Y.cols; ++j) yi[j] += b.data[j];
    }
}

void relu_inplace(Matrix& Y) {
    for (double& v : Y.data)
        if (v < 0.0) v = 0.0;
}

void relu_backward_inplace(Matrix& dY, const Matrix& activated) {
    assert(dY.same_shape(activated));
    for (std::size_t i = 0; i < dY.data.size(); ++i)
        if (activated.data[i] <= 0.0) dY.data[i] = 0.0;
}

void col_sum(const Matrix& A, Matrix& b) {
    assert(b.rows == 1 && b.cols == A.cols);
    b.zero();
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.row(i);
        for (int j = 0; j < A.cols; ++j) b.data[j] += ai[j];
    }
}

void axpy(double alpha, const Matrix& X, Matrix& Y) {
    assert(X.same_shape(Y));
    for (std::size_t i = 0; i < X.data.size(); ++i) Y.data[i] += alpha * X.data[i];
}

Matrix transpose(const Matrix& A) {
    Matrix T(A.cols, A.rows);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
    return T;
}

} // namespace hemidef
