#include "fairvgnn/autodiff.hpp"

#include <cmath>
#include <utility>

#include "fairvgnn/errors.hpp"
#include "fairvgnn/sparse.hpp"

namespace fairvgnn {

const char* op_name(OpKind k) {
    switch (k) {
        case OpKind::Input: return "input";
        case OpKind::Param: return "param";
        case OpKind::ParamColRow: return "param-col-row";
        case OpKind::MatMul: return "matmul";
        case OpKind::SpMM: return "sparse-matmul";
        case OpKind::Add: return "add";
        case OpKind::Mul: return "elementwise-multiply";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::Relu: return "relu";
        case OpKind::Log: return "natural-log";
        case OpKind::Square: return "square";
        case OpKind::MeanAll: return "mean-reduce";
        case OpKind::SumAll: return "sum-reduce";
        case OpKind::BroadcastRow: return "broadcast-row";
        case OpKind::ConcatCols: return "concatenate";
        case OpKind::StopGrad: return "stop-gradient";
        case OpKind::AffineScalar: return "scalar-affine";
    }
    return "?";
}

static std::string shape_str(const DenseMatrix& m) {
    return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

NodeId Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
}

NodeId Tape::input(DenseMatrix value) {
    Node n;
    n.kind = OpKind::Input;
    n.value = std::move(value);
    return push(std::move(n));
}

NodeId Tape::param(ParamTensor* p) {
    Node n;
    n.kind = OpKind::Param;
    n.param = p;
    n.needs_grad = p->trainable;
    return push(std::move(n));
}

NodeId Tape::param_col_as_row(ParamTensor* p, std::size_t col) {
    if (col >= p->value.cols) throw ContractError("param_col_as_row: column out of range");
    Node n;
    n.kind = OpKind::ParamColRow;
    n.param = p;
    n.col = col;
    n.needs_grad = p->trainable;
    return push(std::move(n));
}

static void require(bool ok, OpKind k, const DenseMatrix& a, const DenseMatrix& b) {
    if (!ok) {
        throw ContractError(std::string("tape ") + op_name(k) + ": incompatible shapes " +
                            shape_str(a) + " and " + shape_str(b));
    }
}

NodeId Tape::matmul(NodeId a, NodeId b) {
    Node n;
    n.kind = OpKind::MatMul;
    n.a = a;
    n.b = b;
    n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
    return push(std::move(n));
}

NodeId Tape::spmm(const SparseAdj* adj, NodeId x) {
    Node n;
    n.kind = OpKind::SpMM;
    n.adj = adj;
    n.a = x;
    n.needs_grad = nodes_[x].needs_grad;
    return push(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
    Node n;
    n.kind = OpKind::Add;
    n.a = a;
    n.b = b;
    n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
    return push(std::move(n));
}

NodeId Tape::mul(NodeId a, NodeId b) {
    Node n;
    n.kind = OpKind::Mul;
    n.a = a;
    n.b = b;
    n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
    return push(std::move(n));
}

#define FAIRVGNN_UNARY(method, kind)            \
    NodeId Tape::method(NodeId a) {             \
        Node n;                                 \
        n.kind = kind;                          \
        n.a = a;                                \
        n.needs_grad = nodes_[a].needs_grad;    \
        return push(std::move(n));              \
    }

FAIRVGNN_UNARY(sigmoid, OpKind::Sigmoid)
FAIRVGNN_UNARY(relu, OpKind::Relu)
FAIRVGNN_UNARY(log, OpKind::Log)
FAIRVGNN_UNARY(square, OpKind::Square)
FAIRVGNN_UNARY(mean_all, OpKind::MeanAll)
FAIRVGNN_UNARY(sum_all, OpKind::SumAll)

#undef FAIRVGNN_UNARY

NodeId Tape::broadcast_row(NodeId row, std::size_t rows) {
    Node n;
    n.kind = OpKind::BroadcastRow;
    n.a = row;
    n.bc_rows = rows;
    n.needs_grad = nodes_[row].needs_grad;
    return push(std::move(n));
}

NodeId Tape::concat_cols(NodeId a, NodeId b) {
    Node n;
    n.kind = OpKind::ConcatCols;
    n.a = a;
    n.b = b;
    n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
    return push(std::move(n));
}

NodeId Tape::stop_gradient(NodeId a) {
    Node n;
    n.kind = OpKind::StopGrad;
    n.a = a;
    n.needs_grad = false;  // blocks every path through this node
    return push(std::move(n));
}

NodeId Tape::affine(NodeId a, double alpha, double beta) {
    Node n;
    n.kind = OpKind::AffineScalar;
    n.a = a;
    n.alpha = alpha;
    n.beta = beta;
    n.needs_grad = nodes_[a].needs_grad;
    return push(std::move(n));
}

DenseMatrix& Tape::mutable_input(NodeId id) {
    if (nodes_[id].kind != OpKind::Input) throw ContractError("mutable_input: node is not an input");
    return nodes_[id].value;
}

void Tape::compute(Node& n, std::size_t idx, bool check_finite) {
    switch (n.kind) {
        case OpKind::Input:
            break;
        case OpKind::Param:
            n.value = n.param->value;
            break;
        case OpKind::ParamColRow: {
            const DenseMatrix& pv = n.param->value;
            n.value = DenseMatrix(1, pv.rows);
            for (std::size_t i = 0; i < pv.rows; ++i) n.value.at(0, i) = pv.at(i, n.col);
            break;
        }
        case OpKind::MatMul:
            matmul_into(nodes_[n.a].value, nodes_[n.b].value, n.value);
            break;
        case OpKind::SpMM:
            spmm_into(*n.adj, nodes_[n.a].value, n.value);
            break;
        case OpKind::Add: {
            const DenseMatrix& a = nodes_[n.a].value;
            const DenseMatrix& b = nodes_[n.b].value;
            require(a.same_shape(b), OpKind::Add, a, b);
            n.value.rows = a.rows;
            n.value.cols = a.cols;
            n.value.data.resize(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) n.value.data[i] = a.data[i] + b.data[i];
            break;
        }
        case OpKind::Mul: {
            const DenseMatrix& a = nodes_[n.a].value;
            const DenseMatrix& b = nodes_[n.b].value;
            require(a.same_shape(b), OpKind::Mul, a, b);
            n.value.rows = a.rows;
            n.value.cols = a.cols;
            n.value.data.resize(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) n.value.data[i] = a.data[i] * b.data[i];
            break;
        }
        case OpKind::Sigmoid: {
            const DenseMatrix& a = nodes_[n.a].value;
            n.value.rows = a.rows;
            n.value.cols = a.cols;
            n.value.data.resize(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                double x = a.data[i];
                // evaluate from the stable side to avoid overflow in exp
                n.value.data[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                           : std::exp(x) / (1.0 + std::exp(x));
            }
            break;
        }
        case OpKind::Relu: {
            const DenseMatrix& a = nodes_[n.a].value;
            n.value.rows = a.rows;
            n.value.cols = a.cols;
            n.value.data.resize(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) n.value.data[i] = a.data[i] > 0.0 ? a.data[i] : 0.0;
            break;
        }
        case OpKind::Log: {
            const DenseMatrix& a = nodes_[n.a].value;
            n.value.rows = a.rows;
            n.value.cols = a.cols;
            n.value.data.resize(a.size());
            for (std::size_t i = 0; i < a.size(); ++i)
                n.value.data[i] = std::log(a.data[i] < kLogEps ? kLogEps : a.data[i]);
            break;
        }
        case OpKind::Square: {
            const DenseMatrix& a = nodes_[n.a].value;
            n.value.rows = a.rows;
            n.value.cols = a.cols;
            n.value.data.resize(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) n.value.data[i] = a.data[i] * a.data[i];
            break;
        }
        case OpKind::MeanAll: {
            const DenseMatrix& a = nodes_[n.a].value;
            double acc = 0.0;
            for (double x : a.data) acc += x;
            n.value = DenseMatrix(1, 1);
            n.value.data[0] = acc / static_cast<double>(a.size());
            break;
        }
        case OpKind::SumAll: {
            const DenseMatrix& a = nodes_[n.a].value;
            double acc = 0.0;
            for (double x : a.data) acc += x;
            n.value = DenseMatrix(1, 1);
            n.value.data[0] = acc;
            break;
        }
        case OpKind::BroadcastRow: {
            const DenseMatrix& a = nodes_[n.a].value;
            if (a.rows != 1) throw ContractError("broadcast-row: operand must be a 1-row matrix");
            n.value.rows = n.bc_rows;
            n.value.cols = a.cols;
            n.value.data.resize(n.bc_rows * a.cols);
            for (std::size_t i = 0; i < n.bc_rows; ++i)
                for (std::size_t j = 0; j < a.cols; ++j) n.value.data[i * a.cols + j] = a.data[j];
            break;
        }
        case OpKind::ConcatCols: {
            const DenseMatrix& a = nodes_[n.a].value;
            const DenseMatrix& b = nodes_[n.b].value;
            if (a.rows != b.rows) {
                throw ContractError("tape concatenate: row counts " + shape_str(a) + " vs " +
                                    shape_str(b) + " differ");
            }
            n.value.rows = a.rows;
            n.value.cols = a.cols + b.cols;
            n.value.data.resize(n.value.rows * n.value.cols);
            for (std::size_t i = 0; i < a.rows; ++i) {
                double* out = &n.value.data[i * n.value.cols];
                const double* pa = &a.data[i * a.cols];
                const double* pb = &b.data[i * b.cols];
                for (std::size_t j = 0; j < a.cols; ++j) out[j] = pa[j];
                for (std::size_t j = 0; j < b.cols; ++j) out[a.cols + j] = pb[j];
            }
            break;
        }
        case OpKind::StopGrad:
            n.value = nodes_[n.a].value;
            break;
        case OpKind::AffineScalar: {
            const DenseMatrix& a = nodes_[n.a].value;
            n.value.rows = a.rows;
            n.value.cols = a.cols;
            n.value.data.resize(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) n.value.data[i] = n.alpha * a.data[i] + n.beta;
            break;
        }
    }
    if (check_finite && !n.value.all_finite()) {
        throw NumericError(std::string("tape ") + op_name(n.kind) + " produced a non-finite value at node " +
                           std::to_string(idx));
    }
}

void Tape::forward(bool check_finite) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) compute(nodes_[i], i, check_finite);
}

void Tape::accumulate(std::size_t idx) {
    Node& n = nodes_[idx];
    const DenseMatrix& g = n.grad;
    auto grad_of = [&](NodeId id) -> DenseMatrix& {
        Node& t = nodes_[id];
        if (t.grad.rows != t.value.rows || t.grad.cols != t.value.cols) {
            t.grad = DenseMatrix(t.value.rows, t.value.cols);
        }
        return t.grad;
    };
    auto wants = [&](NodeId id) { return id != kNoNode && nodes_[id].needs_grad; };

    switch (n.kind) {
        case OpKind::Input:
            break;
        case OpKind::Param:
            if (n.param->trainable) {
                for (std::size_t i = 0; i < g.size(); ++i) n.param->grad.data[i] += g.data[i];
            }
            break;
        case OpKind::ParamColRow:
            if (n.param->trainable) {
                for (std::size_t i = 0; i < n.param->value.rows; ++i)
                    n.param->grad.at(i, n.col) += g.at(0, i);
            }
            break;
        case OpKind::MatMul: {
            if (wants(n.a)) matmul_a_bt_acc(g, nodes_[n.b].value, grad_of(n.a));
            if (wants(n.b)) matmul_at_b_acc(nodes_[n.a].value, g, grad_of(n.b));
            break;
        }
        case OpKind::SpMM:
            if (wants(n.a)) spmm_transposed_acc(*n.adj, g, grad_of(n.a));
            break;
        case OpKind::Add: {
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
            }
            if (wants(n.b)) {
                DenseMatrix& gb = grad_of(n.b);
                for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i];
            }
            break;
        }
        case OpKind::Mul: {
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                const DenseMatrix& bv = nodes_[n.b].value;
                for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * bv.data[i];
            }
            if (wants(n.b)) {
                DenseMatrix& gb = grad_of(n.b);
                const DenseMatrix& av = nodes_[n.a].value;
                for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i] * av.data[i];
            }
            break;
        }
        case OpKind::Sigmoid:
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    double s = n.value.data[i];
                    ga.data[i] += g.data[i] * s * (1.0 - s);
                }
            }
            break;
        case OpKind::Relu:
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                const DenseMatrix& av = nodes_[n.a].value;
                for (std::size_t i = 0; i < g.size(); ++i)
                    if (av.data[i] > 0.0) ga.data[i] += g.data[i];
            }
            break;
        case OpKind::Log:
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                const DenseMatrix& av = nodes_[n.a].value;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    double x = av.data[i] < kLogEps ? kLogEps : av.data[i];
                    ga.data[i] += g.data[i] / x;
                }
            }
            break;
        case OpKind::Square:
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                const DenseMatrix& av = nodes_[n.a].value;
                for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += 2.0 * g.data[i] * av.data[i];
            }
            break;
        case OpKind::MeanAll:
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                double s = g.data[0] / static_cast<double>(ga.size());
                for (double& x : ga.data) x += s;
            }
            break;
        case OpKind::SumAll:
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                for (double& x : ga.data) x += g.data[0];
            }
            break;
        case OpKind::BroadcastRow:
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                for (std::size_t i = 0; i < n.bc_rows; ++i)
                    for (std::size_t j = 0; j < ga.cols; ++j) ga.data[j] += g.data[i * ga.cols + j];
            }
            break;
        case OpKind::ConcatCols: {
            const std::size_t ac = nodes_[n.a].value.cols;
            const std::size_t bc = nodes_[n.b].value.cols;
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                for (std::size_t i = 0; i < ga.rows; ++i)
                    for (std::size_t j = 0; j < ac; ++j) ga.data[i * ac + j] += g.data[i * (ac + bc) + j];
            }
            if (wants(n.b)) {
                DenseMatrix& gb = grad_of(n.b);
                for (std::size_t i = 0; i < gb.rows; ++i)
                    for (std::size_t j = 0; j < bc; ++j)
                        gb.data[i * bc + j] += g.data[i * (ac + bc) + ac + j];
            }
            break;
        }
        case OpKind::StopGrad:
            break;
        case OpKind::AffineScalar:
            if (wants(n.a)) {
                DenseMatrix& ga = grad_of(n.a);
                for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += n.alpha * g.data[i];
            }
            break;
    }
}

void Tape::backward(NodeId loss) {
    const Node& ln = nodes_[loss];
    if (ln.value.rows != 1 || ln.value.cols != 1) {
        throw ContractError("backward: loss node must be 1x1, got " + shape_str(ln.value));
    }
    for (Node& n : nodes_) {
        if (n.needs_grad) {
            n.grad = DenseMatrix(n.value.rows, n.value.cols);
        } else {
            n.grad = DenseMatrix();
        }
    }
    if (!nodes_[loss].needs_grad) return;  // loss touches no trainable parameter
    nodes_[loss].grad = DenseMatrix::full(1, 1, 1.0);
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (nodes_[i].needs_grad) accumulate(i);
    }
}

DenseMatrix finite_diff_grad(const std::function<double(const DenseMatrix&)>& scalar_fn,
                             const DenseMatrix& point, double h) {
    if (!(h > 0.0)) throw ContractError("finite_diff_grad: h must be positive");
    DenseMatrix grad(point.rows, point.cols);
    DenseMatrix x = point;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double orig = x.data[i];
        x.data[i] = orig + h;
        double fp = scalar_fn(x);
        x.data[i] = orig - h;
        double fm = scalar_fn(x);
        x.data[i] = orig;
        grad.data[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

}  // namespace fairvgnn
