#pragma once

#include <cstddef>
#include <vector>

namespace fairvgnn {

/// Row-major dense matrix of 64-bit floats. The one tensor type in the
/// project; vectors are n-by-1 (columns) or 1-by-n (rows).
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    DenseMatrix(std::size_t r, std::size_t c, std::vector<double> values);

    static DenseMatrix zeros(std::size_t r, std::size_t c) { return DenseMatrix(r, c); }
    static DenseMatrix full(std::size_t r, std::size_t c, double v);
    static DenseMatrix identity(std::size_t n);
    static DenseMatrix row_vector(std::vector<double> values);
    static DenseMatrix col_vector(std::vector<double> values);

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::size_t size() const { return rows * cols; }
    bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }

    void fill(double v);
    bool all_finite() const;
};

// Out-of-place reference kernels. The autodiff tape uses the *_into forms
// to reuse buffers in inner loops.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
void matmul_into(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
// out += a^T * b  and  out += a * b^T (backward kernels)
void matmul_at_b_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void matmul_a_bt_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);

DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& a, double s);

double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);

}  // namespace fairvgnn
