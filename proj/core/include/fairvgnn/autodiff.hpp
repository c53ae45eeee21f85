#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fairvgnn/tensor.hpp"

namespace fairvgnn {

struct SparseAdj;

/// Trainable parameter: value plus gradient accumulator of the same shape.
struct ParamTensor {
    DenseMatrix value;
    DenseMatrix grad;
    bool trainable = true;

    ParamTensor() = default;
    explicit ParamTensor(DenseMatrix v) : value(std::move(v)), grad(value.rows, value.cols) {}

    void zero_grad() { grad.fill(0.0); }
};

using NodeId = std::size_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Clamp applied inside the log primitive; keeps BCE losses finite on
/// saturated sigmoids.
inline constexpr double kLogEps = 1e-12;

enum class OpKind {
    Input,
    Param,
    ParamColRow,  // column c of a param read as a 1 x rows row vector
    MatMul,
    SpMM,
    Add,
    Mul,
    Sigmoid,
    Relu,
    Log,
    Square,
    MeanAll,
    SumAll,
    BroadcastRow,
    ConcatCols,
    StopGrad,
    AffineScalar,  // alpha * x + beta with scalar constants
};

const char* op_name(OpKind k);

/// Reverse-mode tape over dense matrices. Nodes are recorded in topological
/// order; forward() recomputes every value from the current leaf contents,
/// so one tape can be replayed across optimizer steps without rebuilding.
///
/// Primitives: matmul, sparse-matmul, add, elementwise-multiply, sigmoid,
/// natural-log (guarded at kLogEps), square, mean-reduce, sum-reduce,
/// broadcast-row, concatenate, stop-gradient; plus relu and scalar-affine,
/// which the encoders and losses need.
class Tape {
public:
    // ---- leaves ----
    NodeId input(DenseMatrix value);
    NodeId param(ParamTensor* p);
    NodeId param_col_as_row(ParamTensor* p, std::size_t col);

    // ---- primitives ----
    NodeId matmul(NodeId a, NodeId b);
    NodeId spmm(const SparseAdj* adj, NodeId x);
    NodeId add(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId sigmoid(NodeId a);
    NodeId relu(NodeId a);
    NodeId log(NodeId a);
    NodeId square(NodeId a);
    NodeId mean_all(NodeId a);
    NodeId sum_all(NodeId a);
    NodeId broadcast_row(NodeId row, std::size_t rows);
    NodeId concat_cols(NodeId a, NodeId b);
    NodeId stop_gradient(NodeId a);
    NodeId affine(NodeId a, double alpha, double beta);

    // ---- composites (emit primitives only) ----
    NodeId sub(NodeId a, NodeId b) { return add(a, affine(b, -1.0, 0.0)); }

    // ---- execution ----
    void forward(bool check_finite = true);
    void backward(NodeId loss);

    const DenseMatrix& value(NodeId id) const { return nodes_[id].value; }
    DenseMatrix& mutable_input(NodeId id);
    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        OpKind kind;
        NodeId a = kNoNode;
        NodeId b = kNoNode;
        const SparseAdj* adj = nullptr;
        ParamTensor* param = nullptr;
        std::size_t col = 0;
        double alpha = 1.0;
        double beta = 0.0;
        std::size_t bc_rows = 0;
        DenseMatrix value;
        DenseMatrix grad;
        bool needs_grad = false;
    };

    NodeId push(Node n);
    void compute(Node& n, std::size_t idx, bool check_finite);
    void accumulate(std::size_t idx);

    std::vector<Node> nodes_;
};

/// Central finite differences: (f(x+h) - f(x-h)) / 2h per coordinate.
/// The independent gradient oracle used throughout the tests.
DenseMatrix finite_diff_grad(const std::function<double(const DenseMatrix&)>& scalar_fn,
                             const DenseMatrix& point, double h);

}  // namespace fairvgnn
