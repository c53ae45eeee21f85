#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "fairvgnn/tensor.hpp"

namespace fairvgnn {

/// CSR adjacency over n nodes. Column indices are strictly increasing
/// within each row, which fixes the accumulation order of every product.
struct SparseAdj {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;  // length n+1
    std::vector<std::size_t> col_idx;
    std::vector<double> vals;

    std::size_t nnz() const { return col_idx.size(); }
};

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

/// Binary adjacency from an edge list. Self-loops in the input are kept as
/// single diagonal entries. Duplicates collapse when dedup is set.
SparseAdj build_csr(const EdgeList& edges, std::size_t n, bool undirected, bool dedup);

/// Symmetric GCN normalization with self-loops: D~^{-1/2} (A + I) D~^{-1/2}.
SparseAdj normalize_sym(const SparseAdj& adj);

/// Row normalization D^{-1} A, optionally on A + I. Zero-degree rows stay
/// zero when self-loops are off.
SparseAdj normalize_row(const SparseAdj& adj, bool add_self_loops);

/// GIN propagation operator A + (1 + eps) I.
SparseAdj gin_prop(const SparseAdj& adj, double eps);

/// Sparse-dense product adj * X.
DenseMatrix spmm(const SparseAdj& adj, const DenseMatrix& x);
void spmm_into(const SparseAdj& adj, const DenseMatrix& x, DenseMatrix& out);
/// out += adj^T * g (backward of spmm w.r.t. the dense operand).
void spmm_transposed_acc(const SparseAdj& adj, const DenseMatrix& g, DenseMatrix& out);

/// Fraction of non-self-loop edges whose endpoints share the sensitive
/// value. Throws on an edgeless graph.
double edge_homophily(const SparseAdj& adj, const std::vector<std::uint8_t>& sensitive);

}  // namespace fairvgnn
