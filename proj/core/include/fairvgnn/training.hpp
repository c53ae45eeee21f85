#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fairvgnn/dataset.hpp"
#include "fairvgnn/metrics.hpp"
#include "fairvgnn/models.hpp"

namespace fairvgnn {

enum class ClampMode { Adaptive, Plain, Spectral, None };
enum class MaskStrategy { S0, S1, S2 };

ClampMode clamp_mode_from_string(const std::string& s);
const char* to_string(ClampMode m);
MaskStrategy strategy_from_string(const std::string& s);
const char* to_string(MaskStrategy s);

struct TrainConfig {
    std::size_t K = 10;
    std::size_t epochs_d = 5;
    std::size_t epochs_c = 5;
    std::size_t epochs_g = 5;
    double lr_g = 0.01;
    double lr_d = 0.01;
    double lr_c = 0.01;
    double lr_f = 0.01;
    double alpha = 0.5;
    double epsilon = 0.1;
    std::size_t total_epochs = 200;
    double tau = 1.0;
    MaskMode mask_mode = MaskMode::Hard;
    ClampMode clamp_mode = ClampMode::Adaptive;
    std::uint64_t seed = 1;

    EncoderSpec encoder;
    std::array<double, 3> split_ratios{0.5, 0.25, 0.25};

    void validate() const;
};

struct TrainReport {
    MetricsRecord metrics;
    std::vector<double> loss_d;    // per outer epoch, value at the last inner step
    std::vector<double> loss_c;
    std::vector<double> loss_g;
    std::vector<double> disc_acc;  // discriminator accuracy on sensitive prediction
    std::vector<double> keep_prob; // final per-channel keep probabilities
    double homophily = 0.0;
};

struct TrainHooks {
    std::function<void(std::size_t epoch, const ModelBundle& bundle)> on_epoch_end;
};

// ---- losses (value level; the trainer builds the same expressions on the tape) ----

/// Eq-8 style discriminator objective: mean over nodes of
/// S log d + (1-S) log(1-d). Always <= 0; maximized during training.
double loss_discriminator(const std::vector<std::uint8_t>& sensitive,
                          const std::vector<double>& disc_scores);

/// Generator objective: mean (d - 0.5)^2 plus alpha * ||m - 1||^2 (squared
/// distance summed over channels).
double loss_generator(const std::vector<double>& disc_scores, const std::vector<double>& mask,
                      double alpha);

/// Plain BCE of the classifier scores against labels.
double loss_classifier(const std::vector<std::uint8_t>& y, const std::vector<double>& class_scores);

// ---- weight regularizers ----

/// Clamp every entry to |W_ij| <= epsilon * p_j, channels along columns.
void adaptive_clamp(DenseMatrix& w, const std::vector<double>& p, double epsilon);
/// Same rule with channels along rows (the encoder's storage layout).
void adaptive_clamp_rows(DenseMatrix& w, const std::vector<double>& p, double epsilon);
/// Clamp every entry to |W_ij| <= epsilon.
void plain_clamp(DenseMatrix& w, double epsilon);
/// W divided by its largest singular value (power iteration); a zero matrix
/// passes through unchanged.
DenseMatrix spectral_normalize(const DenseMatrix& w, std::size_t iterations);

// ---- Theorem-2 bound ----

struct Theorem2Result {
    double exact = 0.0;  // ||(2 chi - 1) W dmu||_2
    double bound = 0.0;  // clamped upper bound
};

/// Both sides of the group-mean bound. exact <= bound is guaranteed when
/// delta_mu is entrywise nonnegative and W is already clamped.
Theorem2Result theorem2_bound(const DenseMatrix& w_first_layer, const std::vector<double>& p,
                              double epsilon, const std::vector<double>& delta_mu, double chi,
                              const std::vector<std::size_t>& sensitive_set);

/// Empirical counterpart on a generated graph: one-layer row-normalized
/// (with self-loops) linear encoder H = (P X) W^T, returning the norm of
/// the difference of group-mean representations.
double theorem2_empirical_norm(const GraphDataset& graph, const DenseMatrix& w_first_layer);

// ---- training ----

struct TrainOutcome {
    TrainReport report;
    ModelBundle bundle;
    Splits splits;
};

/// Full adversarial loop: per outer epoch, sample K fair views, train the
/// discriminator on stop-gradient encodings, the classifier and encoder on
/// BCE, the generator and encoder against the (d-0.5)^2 objective, then
/// clamp the encoder's first layer with p = mean of the K sampled masks.
TrainOutcome train_fairvgnn_detailed(const GraphDataset& dataset, const TrainConfig& config,
                                     const TrainHooks* hooks = nullptr);

TrainReport train_fairvgnn(const GraphDataset& dataset, const TrainConfig& config);

// ---- masking-strategy baselines ----

struct BaselineOptions {
    double lr = 0.01;
    std::size_t epochs = 200;
    std::uint64_t seed = 1;
    std::size_t hidden = 16;
    std::array<double, 3> split_ratios{0.5, 0.25, 0.25};
};

/// S0 trains unmasked; S1 masks the top-k channels by |rho| of the raw
/// features; S2 by |rho| of features propagated with the encoder's own
/// operator. Plain BCE, no adversary, no clamping, no dropout.
MetricsRecord run_masking_baseline(const GraphDataset& dataset, MaskStrategy strategy,
                                   EncoderKind encoder_kind, std::size_t k, bool no_activation,
                                   const BaselineOptions& opts = {});

}  // namespace fairvgnn
