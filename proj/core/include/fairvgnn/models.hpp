#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairvgnn/autodiff.hpp"
#include "fairvgnn/optim.hpp"
#include "fairvgnn/rng.hpp"
#include "fairvgnn/sparse.hpp"

namespace fairvgnn {

enum class EncoderKind { GCN, GIN, SAGE, MLP };
enum class MaskMode { Hard, Soft };

EncoderKind encoder_kind_from_string(const std::string& s);
const char* to_string(EncoderKind k);
MaskMode mask_mode_from_string(const std::string& s);
const char* to_string(MaskMode m);

/// GCN and GIN are single propagation layers, SAGE stacks two; MLP is the
/// propagation-free probe used by the masking baselines.
struct EncoderSpec {
    EncoderKind kind = EncoderKind::GCN;
    std::size_t hidden = 16;
    double dropout = 0.5;
    double gin_eps = 0.0;
    std::size_t gin_mlp_layers = 1;  // depth of the GIN transformation
    bool inter_activation = true;    // ReLU between SAGE/GIN-MLP layers

    std::size_t layers() const { return kind == EncoderKind::SAGE ? 2 : 1; }
};

/// Per-channel keep/mask scores feeding the Gumbel-Softmax draw. Free
/// logits stand in for log(pi); both columns start at zero (keep
/// probability one half).
struct MaskSampler {
    ParamTensor logits;  // d x 2: column 0 keep, column 1 mask
    double tau = 1.0;
    MaskMode mode = MaskMode::Hard;

    MaskSampler() = default;
    MaskSampler(std::size_t d, double tau_, MaskMode mode_)
        : logits(DenseMatrix(d, 2)), tau(tau_), mode(mode_) {}

    std::size_t channels() const { return logits.value.rows; }
    /// Expected keep probability per channel: softmax of the two logits,
    /// exact for hard draws by the Gumbel-max property.
    std::vector<double> keep_probability() const;
};

/// One Gumbel draw: the noise (kept for replaying the draw on a tape), the
/// hard outcome, the tempered soft probability, and the mask value actually
/// applied under the sampler's mode.
struct MaskDraw {
    DenseMatrix noise_diff;     // 1 x d: g_keep - g_mask
    std::vector<double> hard;   // one-hot keep outcomes in {0,1}
    std::vector<double> soft;   // sigmoid((dlogit + dnoise)/tau)
    std::vector<double> value;  // hard (straight-through) or soft per mode
};

MaskDraw draw_mask(const MaskSampler& sampler, SplitMix64& rng);

/// K independent mask vectors; hard mode yields exact {0,1} entries.
std::vector<std::vector<double>> sample_masks(const MaskSampler& sampler, std::size_t k, SplitMix64& rng);

/// X~ = X (.) m, every row scaled channel-wise.
DenseMatrix apply_mask(const DenseMatrix& x, const std::vector<double>& m);

/// Rebuild the draw as a differentiable tape expression. Hard mode uses the
/// straight-through construction m = hard - sg(p) + p. The returned input
/// ids let a caller overwrite the noise (and hard outcome) for later draws
/// without rebuilding the tape.
struct MaskTapeNodes {
    NodeId mask = kNoNode;
    NodeId noise_in = kNoNode;
    NodeId hard_in = kNoNode;  // kNoNode in soft mode
};
MaskTapeNodes mask_on_tape(Tape& tape, MaskSampler& sampler, const MaskDraw& draw);

/// Encoder weights. GCN/GIN: [w1(, w2)]. SAGE: [self1, neigh1, self2,
/// neigh2]; both input-facing matrices count as the first layer for
/// clamping purposes. MLP: [w1].
struct EncoderParams {
    std::vector<ParamTensor> weights;

    std::vector<ParamTensor*> all();
    /// Indices of weight matrices whose rows are indexed by input channel.
    std::vector<std::size_t> first_layer_indices(const EncoderSpec& spec) const;
};

EncoderParams init_encoder(const EncoderSpec& spec, std::size_t d, SplitMix64& rng);

/// Plain forward pass (no tape, no dropout): the evaluation/probe path.
DenseMatrix encode(const EncoderSpec& spec, const EncoderParams& params, const SparseAdj& adj,
                   const DenseMatrix& x_tilde);

/// sigmoid(H w + b), one score per node.
std::vector<double> predict_head(const ParamTensor& w, const ParamTensor& b, const DenseMatrix& h);

/// Propagation operators and propagated features, fixed per (graph, spec).
/// Column masking commutes with left-multiplication by the operator, so
/// prop_x (.) m equals prop (X (.) m) and the per-view spmm disappears.
struct EncoderOperators {
    SparseAdj prop;      // normalized propagation (unused for MLP)
    DenseMatrix prop_x;  // prop * X
    DenseMatrix x;       // raw features (SAGE/MLP need them directly)
};

EncoderOperators build_operators(const EncoderSpec& spec, const SparseAdj& adj, const DenseMatrix& x);

struct EncoderTapeInputs {
    NodeId x = kNoNode;       // masked raw features (SAGE, MLP)
    NodeId prop_x = kNoNode;  // masked propagated features (GCN, GIN, SAGE)
    const SparseAdj* prop = nullptr;  // SAGE second-layer propagation
};

NodeId encode_on_tape(Tape& tape, const EncoderSpec& spec, EncoderParams& params,
                      const EncoderTapeInputs& in);

NodeId head_on_tape(Tape& tape, ParamTensor& w, ParamTensor& b, NodeId h, std::size_t rows);

/// Everything trainable plus optimizer state for one run.
struct ModelBundle {
    EncoderSpec spec;
    MaskSampler sampler;
    EncoderParams encoder;
    ParamTensor cls_w, cls_b;
    ParamTensor disc_w, disc_b;
    AdamState opt_g, opt_f, opt_c, opt_d;

    std::vector<ParamTensor*> params_generator() { return {&sampler.logits}; }
    std::vector<ParamTensor*> params_encoder() { return encoder.all(); }
    std::vector<ParamTensor*> params_classifier() { return {&cls_w, &cls_b}; }
    std::vector<ParamTensor*> params_discriminator() { return {&disc_w, &disc_b}; }
};

ModelBundle init_bundle(const EncoderSpec& spec, std::size_t d, double tau, MaskMode mode,
                        std::uint64_t seed);

/// Versioned JSON checkpoint of all parameters, sampler logits, spec and
/// RNG position; round-trips bit-exactly.
void save_checkpoint(const ModelBundle& bundle, std::uint64_t rng_state, const std::string& path);
struct Checkpoint {
    ModelBundle bundle;
    std::uint64_t rng_state = 0;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace fairvgnn
