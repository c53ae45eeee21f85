#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairvgnn/sparse.hpp"
#include "fairvgnn/tensor.hpp"

namespace fairvgnn {

/// Per-layer sensitive correlations. Row 0 holds the raw-feature values;
/// row l holds correlations of P^l X. Undefined entries (constant channels)
/// are stored as NaN and excluded from rankings.
struct CorrelationProfile {
    std::size_t layers = 0;    // L; profile has L+1 rows
    std::size_t channels = 0;  // d
    std::vector<double> rho;   // (L+1) x d, row-major

    double at(std::size_t layer, std::size_t channel) const { return rho[layer * channels + channel]; }
};

/// Population Pearson correlation of every feature channel against the
/// binarized sensitive vector. Constant channels yield NaN; a constant S
/// is an error.
std::vector<double> sensitive_correlation(const DenseMatrix& x, const std::vector<std::uint8_t>& s);

/// Correlations of P^l X for l = 0..layers under the given propagation.
CorrelationProfile propagated_correlation(const DenseMatrix& x, const SparseAdj& adj_norm,
                                          std::size_t layers, const std::vector<std::uint8_t>& s);

/// Indices of the k largest |rho| values; NaN entries are skipped; ties
/// break toward the lower index.
std::vector<std::size_t> topk_sensitive_channels(const std::vector<double>& rho, std::size_t k);

/// CSV rows (layer,channel,rho) for external plotting.
std::string profile_to_csv(const CorrelationProfile& profile);

}  // namespace fairvgnn
