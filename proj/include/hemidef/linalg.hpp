#pragma once

#include <cstddef>
#include <vector>

namespace hemidef {

// Dense row-major matrix of doubles. Small and unclever on purpose; the
// heavy kernels below carry the OpenMP pragmas.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
    double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }

    void zero() { std::fill(data.begin(), data.end(), 0.0); }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// C = A * B. The serial reference is kept alongside the parallel kernel; both
// accumulate each output element over k in ascending order, so their results
// are bitwise identical and tests may compare them exactly.
void matmul_serial(const Matrix& A, const Matrix& B, Matrix& C);
void matmul(const Matrix& A, const Matrix& B, Matrix& C);

// C = A^T * B
void matmul_at_b(const Matrix& A, const Matrix& B, Matrix& C);
// C = A * B^T
void matmul_a_bt(const Matrix& A, const Matrix& B, Matrix& C);

Matrix multiply(const Matrix& A, const Matrix& B);

// y[i][j] += b[0][j]
void add_row_bias(Matrix& Y, const Matrix& b);

// in-place rectifier and its backward pass (mask taken from the forward output)
void relu_inplace(Matrix& Y);
void relu_backward_inplace(Matrix& dY, const Matrix& activated);

// b[0][j] = sum_i A[i][j]
void col_sum(const Matrix& A, Matrix& b);

void axpy(double alpha, const Matrix& X, Matrix& Y);  // Y += alpha * X

Matrix transpose(const Matrix& A);

} // namespace hemidef
