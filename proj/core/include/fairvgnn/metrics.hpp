#pragma once

#include <cstdint>
#include <vector>

namespace fairvgnn {

/// One evaluation pass. All values are fractions in [0,1]; reports render
/// them as percentages.
struct MetricsRecord {
    double auc = 0.0;
    double f1 = 0.0;
    double acc = 0.0;
    double dsp = 0.0;
    double deo = 0.0;
    double threshold = 0.5;
};

/// Statistical parity gap |P(yhat=1|s=0) - P(yhat=1|s=1)|.
double delta_sp(const std::vector<std::uint8_t>& y_hat, const std::vector<std::uint8_t>& sensitive);

/// Equal opportunity gap |P(yhat=1|y=1,s=0) - P(yhat=1|y=1,s=1)|.
double delta_eo(const std::vector<std::uint8_t>& y_hat, const std::vector<std::uint8_t>& y,
                const std::vector<std::uint8_t>& sensitive);

/// Mann-Whitney AUC; ties count one half.
double auc_score(const std::vector<double>& scores, const std::vector<std::uint8_t>& y);

struct F1Acc {
    double f1 = 0.0;
    double acc = 0.0;
};

/// F1 of the positive class (0 when no true or predicted positives) and
/// overall accuracy.
F1Acc f1_acc(const std::vector<std::uint8_t>& y_hat, const std::vector<std::uint8_t>& y);

/// Binarize scores at the threshold (>= threshold is positive).
std::vector<std::uint8_t> threshold_scores(const std::vector<double>& scores, double threshold);

/// All metrics for one evaluation pass at the given threshold.
MetricsRecord evaluate(const std::vector<double>& scores, const std::vector<std::uint8_t>& y,
                       const std::vector<std::uint8_t>& sensitive, double threshold = 0.5);

}  // namespace fairvgnn
