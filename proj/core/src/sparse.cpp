#include "fairvgnn/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "fairvgnn/errors.hpp"

namespace fairvgnn {

SparseAdj build_csr(const EdgeList& edges, std::size_t n, bool undirected, bool dedup) {
    for (const auto& [s, d] : edges) {
        if (s >= n || d >= n) {
            throw InputError("build_csr: edge (" + std::to_string(s) + "," + std::to_string(d) +
                             ") has endpoint outside [0," + std::to_string(n) + ")");
        }
    }
    std::vector<std::vector<std::size_t>> rows(n);
    auto insert = [&](std::size_t s, std::size_t d) { rows[s].push_back(d); };
    for (const auto& [s, d] : edges) {
        insert(s, d);
        if (undirected && s != d) insert(d, s);
    }
    SparseAdj adj;
    adj.n = n;
    adj.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = rows[i];
        std::sort(r.begin(), r.end());
        if (dedup) r.erase(std::unique(r.begin(), r.end()), r.end());
        adj.row_ptr[i + 1] = adj.row_ptr[i] + r.size();
        for (std::size_t c : r) {
            adj.col_idx.push_back(c);
            adj.vals.push_back(1.0);
        }
    }
    return adj;
}

namespace {

// Add v to the diagonal, returning a fresh CSR with sorted columns.
SparseAdj with_diagonal(const SparseAdj& adj, double diag_add) {
    SparseAdj out;
    out.n = adj.n;
    out.row_ptr.assign(adj.n + 1, 0);
    out.col_idx.reserve(adj.nnz() + adj.n);
    out.vals.reserve(adj.nnz() + adj.n);
    for (std::size_t i = 0; i < adj.n; ++i) {
        bool placed = false;
        for (std::size_t k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k) {
            std::size_t j = adj.col_idx[k];
            if (!placed && j >= i) {
                if (j == i) {
                    out.col_idx.push_back(i);
                    out.vals.push_back(adj.vals[k] + diag_add);
                } else {
                    out.col_idx.push_back(i);
                    out.vals.push_back(diag_add);
                    out.col_idx.push_back(j);
                    out.vals.push_back(adj.vals[k]);
                }
                placed = true;
                continue;
            }
            out.col_idx.push_back(j);
            out.vals.push_back(adj.vals[k]);
        }
        if (!placed) {
            out.col_idx.push_back(i);
            out.vals.push_back(diag_add);
        }
        out.row_ptr[i + 1] = out.col_idx.size();
    }
    return out;
}

std::vector<double> row_sums(const SparseAdj& adj) {
    std::vector<double> deg(adj.n, 0.0);
    for (std::size_t i = 0; i < adj.n; ++i)
        for (std::size_t k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k) deg[i] += adj.vals[k];
    return deg;
}

}  // namespace

SparseAdj normalize_sym(const SparseAdj& adj) {
    SparseAdj loop = with_diagonal(adj, 1.0);
    std::vector<double> deg = row_sums(loop);
    std::vector<double> inv_sqrt(adj.n);
    for (std::size_t i = 0; i < adj.n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
    for (std::size_t i = 0; i < adj.n; ++i)
        for (std::size_t k = loop.row_ptr[i]; k < loop.row_ptr[i + 1]; ++k)
            loop.vals[k] *= inv_sqrt[i] * inv_sqrt[loop.col_idx[k]];
    return loop;
}

SparseAdj normalize_row(const SparseAdj& adj, bool add_self_loops) {
    SparseAdj out = add_self_loops ? with_diagonal(adj, 1.0) : adj;
    std::vector<double> deg = row_sums(out);
    for (std::size_t i = 0; i < out.n; ++i) {
        if (deg[i] == 0.0) continue;
        double inv = 1.0 / deg[i];
        for (std::size_t k = out.row_ptr[i]; k < out.row_ptr[i + 1]; ++k) out.vals[k] *= inv;
    }
    return out;
}

SparseAdj gin_prop(const SparseAdj& adj, double eps) {
    return with_diagonal(adj, 1.0 + eps);
}

void spmm_into(const SparseAdj& adj, const DenseMatrix& x, DenseMatrix& out) {
    if (adj.n != x.rows) {
        throw ContractError("spmm: adjacency has " + std::to_string(adj.n) + " nodes but X has " +
                            std::to_string(x.rows) + " rows");
    }
    out.rows = adj.n;
    out.cols = x.cols;
    out.data.assign(adj.n * x.cols, 0.0);
    for (std::size_t i = 0; i < adj.n; ++i) {
        double* orow = &out.data[i * x.cols];
        for (std::size_t k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k) {
            const double v = adj.vals[k];
            const double* xrow = &x.data[adj.col_idx[k] * x.cols];
            for (std::size_t j = 0; j < x.cols; ++j) orow[j] += v * xrow[j];
        }
    }
}

DenseMatrix spmm(const SparseAdj& adj, const DenseMatrix& x) {
    DenseMatrix out;
    spmm_into(adj, x, out);
    return out;
}

void spmm_transposed_acc(const SparseAdj& adj, const DenseMatrix& g, DenseMatrix& out) {
    if (adj.n != g.rows || out.rows != adj.n || out.cols != g.cols) {
        throw ContractError("spmm_transposed_acc: shape mismatch");
    }
    for (std::size_t i = 0; i < adj.n; ++i) {
        const double* grow = &g.data[i * g.cols];
        for (std::size_t k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k) {
            const double v = adj.vals[k];
            double* orow = &out.data[adj.col_idx[k] * g.cols];
            for (std::size_t j = 0; j < g.cols; ++j) orow[j] += v * grow[j];
        }
    }
}

double edge_homophily(const SparseAdj& adj, const std::vector<std::uint8_t>& sensitive) {
    if (sensitive.size() != adj.n) throw ContractError("edge_homophily: sensitive vector length mismatch");
    std::size_t total = 0;
    std::size_t same = 0;
    for (std::size_t i = 0; i < adj.n; ++i) {
        for (std::size_t k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k) {
            std::size_t j = adj.col_idx[k];
            if (j == i) continue;  // self-loops excluded
            ++total;
            if (sensitive[i] == sensitive[j]) ++same;
        }
    }
    if (total == 0) throw InputError("edge_homophily: graph has no non-self-loop edges");
    return static_cast<double>(same) / static_cast<double>(total);
}

}  // namespace fairvgnn
