#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fairvgnn/sparse.hpp"
#include "fairvgnn/tensor.hpp"

namespace fairvgnn {

struct Splits {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// An attributed graph with binary labels and a binary sensitive attribute.
/// The sensitive attribute lives inside X as a regular feature channel;
/// S is the binarized copy of that column.
struct GraphDataset {
    std::string name;
    DenseMatrix X;                    // n x d node features
    SparseAdj adj;                    // undirected, deduplicated
    std::vector<std::uint8_t> Y;      // labels in {0,1}
    std::vector<std::uint8_t> S;      // sensitive groups in {0,1}
    std::size_t sensitive_channel = 0;
    Splits splits;
    bool has_splits = false;

    std::vector<std::string> feature_names;
    std::string label_name = "label";
    std::string binarize_rule = "equals";  // "equals" | "threshold" (>= value)
    double binarize_value = 1.0;

    std::size_t n() const { return X.rows; }
    std::size_t d() const { return X.cols; }
};

/// Load nodes.csv / edges.csv / meta.json from a directory. Errors carry
/// the offending file and line.
GraphDataset load_dataset(const std::string& dir_path);

/// Inverse of load_dataset; load(save(ds)) reproduces identical matrices.
void save_dataset(const GraphDataset& ds, const std::string& dir_path);

/// Affinely map each column to [-1, 1]; constant columns become zero;
/// columns listed in skip_channels pass through untouched.
DenseMatrix minmax_normalize(const DenseMatrix& x, const std::vector<std::size_t>& skip_channels);

/// Stratified train/val/test split, deterministic per seed. Ratios must sum
/// to one; split sizes are exact (largest-remainder) and per-class counts
/// stay within one node of the ideal allocation.
Splits make_splits(const std::vector<std::uint8_t>& y, std::uint64_t seed,
                   const std::array<double, 3>& ratios);

/// Theorem-2 style synthetic graph: two sensitive groups with diagonal
/// Gaussian features and stub-matched wiring at homophily chi.
struct SyntheticSpec {
    std::size_t n_per_group = 0;
    std::vector<double> mu1;     // group s1 (sensitive value 1) means
    std::vector<double> mu2;     // group s2 (sensitive value 0) means
    std::vector<double> sigma1;  // per-channel std-devs, > 0
    std::vector<double> sigma2;
    double chi = 1.0;            // target homophily in [0,1]
    double degree = 10.0;        // average degree
};

/// Features are drawn per group; channel 0 of the returned X is the group
/// indicator (the sensitive channel), followed by the d Gaussian channels.
/// Realized same-group edge fraction matches chi by construction.
GraphDataset synth_two_gaussian_graph(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace fairvgnn
