#include "fairvgnn/tensor.hpp"

#include <cmath>
#include <utility>

#include "fairvgnn/errors.hpp"

namespace fairvgnn {

DenseMatrix::DenseMatrix(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != r * c) {
        throw ContractError("DenseMatrix: data length " + std::to_string(data.size()) +
                            " does not match shape " + std::to_string(r) + "x" + std::to_string(c));
    }
}

DenseMatrix DenseMatrix::full(std::size_t r, std::size_t c, double v) {
    DenseMatrix m(r, c);
    m.fill(v);
    return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::row_vector(std::vector<double> values) {
    std::size_t n = values.size();
    return DenseMatrix(1, n, std::move(values));
}

DenseMatrix DenseMatrix::col_vector(std::vector<double> values) {
    std::size_t n = values.size();
    return DenseMatrix(n, 1, std::move(values));
}

void DenseMatrix::fill(double v) {
    for (double& x : data) x = v;
}

bool DenseMatrix::all_finite() const {
    for (double x : data) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

static void check_mm(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows) {
        throw ContractError("matmul: inner dimensions " + std::to_string(a.cols) + " vs " +
                            std::to_string(b.rows) + " do not match");
    }
}

void matmul_into(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
    check_mm(a, b);
    out.rows = a.rows;
    out.cols = b.cols;
    out.data.assign(a.rows * b.cols, 0.0);
    // i-k-j order: streams through b rows, autovectorizes well
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = &a.data[i * a.cols];
        double* orow = &out.data[i * b.cols];
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = &b.data[k * b.cols];
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out;
    matmul_into(a, b, out);
    return out;
}

void matmul_at_b_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
    if (a.rows != b.rows || out.rows != a.cols || out.cols != b.cols) {
        throw ContractError("matmul_at_b_acc: shape mismatch");
    }
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* arow = &a.data[k * a.cols];
        const double* brow = &b.data[k * b.cols];
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* orow = &out.data[i * b.cols];
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
        }
    }
}

void matmul_a_bt_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
    if (a.cols != b.cols || out.rows != a.rows || out.cols != b.rows) {
        throw ContractError("matmul_a_bt_acc: shape mismatch");
    }
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = &a.data[i * a.cols];
        double* orow = &out.data[i * b.rows];
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = &b.data[j * b.cols];
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
            orow[j] += acc;
        }
    }
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix out(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
    return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw ContractError("hadamard: shape mismatch");
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
    return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw ContractError("add: shape mismatch");
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

DenseMatrix scale(const DenseMatrix& a, double s) {
    DenseMatrix out = a;
    for (double& x : out.data) x *= s;
    return out;
}

double frobenius_norm(const DenseMatrix& a) {
    double acc = 0.0;
    for (double x : a.data) acc += x * x;
    return std::sqrt(acc);
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double x : a.data) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace fairvgnn
