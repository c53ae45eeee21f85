#include "fairvgnn/optim.hpp"

#include <cmath>

#include "fairvgnn/errors.hpp"

namespace fairvgnn {

AdamState::AdamState(const std::vector<ParamTensor*>& params) {
    m.reserve(params.size());
    v.reserve(params.size());
    for (const ParamTensor* p : params) {
        m.emplace_back(p->value.rows, p->value.cols);
        v.emplace_back(p->value.rows, p->value.cols);
    }
}

void adam_step(const std::vector<ParamTensor*>& params, AdamState& state, double learning_rate) {
    if (!(learning_rate > 0.0)) throw ContractError("adam_step: learning rate must be positive");
    if (params.size() != state.m.size()) {
        throw ContractError("adam_step: state tracks " + std::to_string(state.m.size()) +
                            " parameters, got " + std::to_string(params.size()));
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        ParamTensor& p = *params[k];
        if (!p.value.same_shape(state.m[k])) {
            throw ContractError("adam_step: parameter " + std::to_string(k) + " shape drifted");
        }
        if (!p.trainable) continue;
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.grad.data[i];
            double& mi = state.m[k].data[i];
            double& vi = state.v[k].data[i];
            mi = state.beta1 * mi + (1.0 - state.beta1) * g;
            vi = state.beta2 * vi + (1.0 - state.beta2) * g * g;
            const double mhat = mi / bc1;
            const double vhat = vi / bc2;
            p.value.data[i] -= learning_rate * mhat / (std::sqrt(vhat) + state.eps);
        }
        p.zero_grad();
    }
}

}  // namespace fairvgnn
