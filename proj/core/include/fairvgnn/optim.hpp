#pragma once

#include <cstddef>
#include <vector>

#include "fairvgnn/autodiff.hpp"

namespace fairvgnn {

/// Adam with bias correction. beta1=0.9, beta2=0.999, eps=1e-8; the paper's
/// baselines all train with these defaults and the learning rate comes from
/// the run config.
struct AdamState {
    std::vector<DenseMatrix> m;  // first moments, one per parameter
    std::vector<DenseMatrix> v;  // second moments
    std::size_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(const std::vector<ParamTensor*>& params);
    AdamState() = default;
};

/// One update over all trainable params; zeroes their gradients afterwards.
void adam_step(const std::vector<ParamTensor*>& params, AdamState& state, double learning_rate);

}  // namespace fairvgnn
