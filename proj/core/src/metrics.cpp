#include "fairvgnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairvgnn/errors.hpp"

namespace fairvgnn {

double delta_sp(const std::vector<std::uint8_t>& y_hat, const std::vector<std::uint8_t>& sensitive) {
    if (y_hat.size() != sensitive.size()) throw ContractError("delta_sp: length mismatch");
    std::size_t n[2] = {0, 0};
    std::size_t pos[2] = {0, 0};
    for (std::size_t i = 0; i < y_hat.size(); ++i) {
        std::size_t g = sensitive[i] ? 1 : 0;
        ++n[g];
        if (y_hat[i]) ++pos[g];
    }
    if (n[0] == 0 || n[1] == 0) throw InputError("delta_sp: a sensitive group is empty");
    double r0 = static_cast<double>(pos[0]) / static_cast<double>(n[0]);
    double r1 = static_cast<double>(pos[1]) / static_cast<double>(n[1]);
    return std::fabs(r0 - r1);
}

double delta_eo(const std::vector<std::uint8_t>& y_hat, const std::vector<std::uint8_t>& y,
                const std::vector<std::uint8_t>& sensitive) {
    if (y_hat.size() != y.size() || y.size() != sensitive.size())
        throw ContractError("delta_eo: length mismatch");
    std::size_t n[2] = {0, 0};
    std::size_t tp[2] = {0, 0};
    for (std::size_t i = 0; i < y_hat.size(); ++i) {
        if (!y[i]) continue;
        std::size_t g = sensitive[i] ? 1 : 0;
        ++n[g];
        if (y_hat[i]) ++tp[g];
    }
    if (n[0] == 0 || n[1] == 0) throw InputError("delta_eo: a sensitive group has no positive labels");
    double r0 = static_cast<double>(tp[0]) / static_cast<double>(n[0]);
    double r1 = static_cast<double>(tp[1]) / static_cast<double>(n[1]);
    return std::fabs(r0 - r1);
}

double auc_score(const std::vector<double>& scores, const std::vector<std::uint8_t>& y) {
    if (scores.size() != y.size()) throw ContractError("auc: length mismatch");
    std::size_t n_pos = 0;
    for (auto v : y) n_pos += v ? 1 : 0;
    std::size_t n_neg = y.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw InputError("auc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // rank-sum with average ranks for ties
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t k = i; k <= j; ++k)
            if (y[order[k]]) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    double np = static_cast<double>(n_pos);
    double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

F1Acc f1_acc(const std::vector<std::uint8_t>& y_hat, const std::vector<std::uint8_t>& y) {
    if (y_hat.size() != y.size()) throw ContractError("f1_acc: length mismatch");
    std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y_hat[i] == y[i]) ++correct;
        if (y_hat[i] && y[i]) ++tp;
        if (y_hat[i] && !y[i]) ++fp;
        if (!y_hat[i] && y[i]) ++fn;
    }
    F1Acc out;
    out.acc = y.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(y.size());
    out.f1 = (2 * tp + fp + fn) == 0 ? 0.0
                                     : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    return out;
}

std::vector<std::uint8_t> threshold_scores(const std::vector<double>& scores, double threshold) {
    std::vector<std::uint8_t> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold ? 1 : 0;
    return out;
}

MetricsRecord evaluate(const std::vector<double>& scores, const std::vector<std::uint8_t>& y,
                       const std::vector<std::uint8_t>& sensitive, double threshold) {
    MetricsRecord rec;
    rec.threshold = threshold;
    std::vector<std::uint8_t> y_hat = threshold_scores(scores, threshold);
    rec.auc = auc_score(scores, y);
    F1Acc fa = f1_acc(y_hat, y);
    rec.f1 = fa.f1;
    rec.acc = fa.acc;
    rec.dsp = delta_sp(y_hat, sensitive);
    rec.deo = delta_eo(y_hat, y, sensitive);
    return rec;
}

}  // namespace fairvgnn
