#include "fairvgnn/models.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fairvgnn/errors.hpp"

namespace fairvgnn {

EncoderKind encoder_kind_from_string(const std::string& s) {
    if (s == "gcn") return EncoderKind::GCN;
    if (s == "gin") return EncoderKind::GIN;
    if (s == "sage") return EncoderKind::SAGE;
    if (s == "mlp") return EncoderKind::MLP;
    throw InputError("unknown encoder kind '" + s + "' (expected gcn|gin|sage|mlp)");
}

const char* to_string(EncoderKind k) {
    switch (k) {
        case EncoderKind::GCN: return "gcn";
        case EncoderKind::GIN: return "gin";
        case EncoderKind::SAGE: return "sage";
        case EncoderKind::MLP: return "mlp";
    }
    return "?";
}

MaskMode mask_mode_from_string(const std::string& s) {
    if (s == "hard") return MaskMode::Hard;
    if (s == "soft") return MaskMode::Soft;
    throw InputError("unknown mask mode '" + s + "' (expected hard|soft)");
}

const char* to_string(MaskMode m) {
    return m == MaskMode::Hard ? "hard" : "soft";
}

std::vector<double> MaskSampler::keep_probability() const {
    std::vector<double> p(channels());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double dl = logits.value.at(i, 0) - logits.value.at(i, 1);
        p[i] = dl >= 0.0 ? 1.0 / (1.0 + std::exp(-dl)) : std::exp(dl) / (1.0 + std::exp(dl));
    }
    return p;
}

MaskDraw draw_mask(const MaskSampler& sampler, SplitMix64& rng) {
    if (!(sampler.tau > 0.0)) throw ContractError("draw_mask: temperature must be positive");
    const std::size_t d = sampler.channels();
    MaskDraw draw;
    draw.noise_diff = DenseMatrix(1, d);
    draw.hard.resize(d);
    draw.soft.resize(d);
    draw.value.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        double g_keep = rng.next_gumbel();
        double g_mask = rng.next_gumbel();
        draw.noise_diff.at(0, i) = g_keep - g_mask;
        double keep_score = sampler.logits.value.at(i, 0) + g_keep;
        double mask_score = sampler.logits.value.at(i, 1) + g_mask;
        draw.hard[i] = keep_score > mask_score ? 1.0 : 0.0;
        double z = (keep_score - mask_score) / sampler.tau;
        draw.soft[i] = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
        draw.value[i] = sampler.mode == MaskMode::Hard ? draw.hard[i] : draw.soft[i];
    }
    return draw;
}

std::vector<std::vector<double>> sample_masks(const MaskSampler& sampler, std::size_t k, SplitMix64& rng) {
    if (k == 0) throw ContractError("sample_masks: K must be at least 1");
    std::vector<std::vector<double>> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(draw_mask(sampler, rng).value);
    return out;
}

DenseMatrix apply_mask(const DenseMatrix& x, const std::vector<double>& m) {
    if (m.size() != x.cols) {
        throw ContractError("apply_mask: mask length " + std::to_string(m.size()) +
                            " but X has " + std::to_string(x.cols) + " channels");
    }
    DenseMatrix out = x;
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) out.at(i, j) *= m[j];
    return out;
}

MaskTapeNodes mask_on_tape(Tape& tape, MaskSampler& sampler, const MaskDraw& draw) {
    const std::size_t d = sampler.channels();
    MaskTapeNodes out;
    NodeId keep = tape.param_col_as_row(&sampler.logits, 0);
    NodeId mask = tape.param_col_as_row(&sampler.logits, 1);
    NodeId diff = tape.sub(keep, mask);
    out.noise_in = tape.input(draw.noise_diff);
    NodeId z = tape.affine(tape.add(diff, out.noise_in), 1.0 / sampler.tau, 0.0);
    NodeId p = tape.sigmoid(z);
    if (sampler.mode == MaskMode::Soft) {
        out.mask = p;
        return out;
    }
    DenseMatrix hard(1, d);
    for (std::size_t i = 0; i < d; ++i) hard.at(0, i) = draw.hard[i];
    out.hard_in = tape.input(std::move(hard));
    // straight-through: value is the hard sample, gradient flows through p
    out.mask = tape.add(tape.sub(out.hard_in, tape.stop_gradient(p)), p);
    return out;
}

std::vector<ParamTensor*> EncoderParams::all() {
    std::vector<ParamTensor*> out;
    out.reserve(weights.size());
    for (auto& w : weights) out.push_back(&w);
    return out;
}

std::vector<std::size_t> EncoderParams::first_layer_indices(const EncoderSpec& spec) const {
    if (spec.kind == EncoderKind::SAGE) return {0, 1};
    return {0};
}

namespace {

DenseMatrix glorot_uniform(std::size_t rows, std::size_t cols, SplitMix64& rng) {
    DenseMatrix w(rows, cols);
    double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (double& v : w.data) v = rng.next_uniform(-a, a);
    return w;
}

}  // namespace

EncoderParams init_encoder(const EncoderSpec& spec, std::size_t d, SplitMix64& rng) {
    EncoderParams params;
    switch (spec.kind) {
        case EncoderKind::GCN:
        case EncoderKind::MLP:
            params.weights.emplace_back(glorot_uniform(d, spec.hidden, rng));
            break;
        case EncoderKind::GIN:
            params.weights.emplace_back(glorot_uniform(d, spec.hidden, rng));
            for (std::size_t l = 1; l < spec.gin_mlp_layers; ++l)
                params.weights.emplace_back(glorot_uniform(spec.hidden, spec.hidden, rng));
            break;
        case EncoderKind::SAGE:
            params.weights.emplace_back(glorot_uniform(d, spec.hidden, rng));
            params.weights.emplace_back(glorot_uniform(d, spec.hidden, rng));
            params.weights.emplace_back(glorot_uniform(spec.hidden, spec.hidden, rng));
            params.weights.emplace_back(glorot_uniform(spec.hidden, spec.hidden, rng));
            break;
    }
    return params;
}

EncoderOperators build_operators(const EncoderSpec& spec, const SparseAdj& adj, const DenseMatrix& x) {
    EncoderOperators ops;
    ops.x = x;
    switch (spec.kind) {
        case EncoderKind::GCN:
            ops.prop = normalize_sym(adj);
            ops.prop_x = spmm(ops.prop, x);
            break;
        case EncoderKind::GIN:
            ops.prop = gin_prop(adj, spec.gin_eps);
            ops.prop_x = spmm(ops.prop, x);
            break;
        case EncoderKind::SAGE:
            // Eq-16 style neighbor term: no self-loops, the self map is separate
            ops.prop = normalize_row(adj, /*add_self_loops=*/false);
            ops.prop_x = spmm(ops.prop, x);
            break;
        case EncoderKind::MLP:
            break;
    }
    return ops;
}

NodeId encode_on_tape(Tape& tape, const EncoderSpec& spec, EncoderParams& params,
                      const EncoderTapeInputs& in) {
    switch (spec.kind) {
        case EncoderKind::GCN: {
            return tape.matmul(in.prop_x, tape.param(&params.weights[0]));
        }
        case EncoderKind::GIN: {
            NodeId h = tape.matmul(in.prop_x, tape.param(&params.weights[0]));
            for (std::size_t l = 1; l < params.weights.size(); ++l) {
                if (spec.inter_activation) h = tape.relu(h);
                h = tape.matmul(h, tape.param(&params.weights[l]));
            }
            return h;
        }
        case EncoderKind::MLP: {
            return tape.matmul(in.x, tape.param(&params.weights[0]));
        }
        case EncoderKind::SAGE: {
            NodeId h1 = tape.add(tape.matmul(in.x, tape.param(&params.weights[0])),
                                 tape.matmul(in.prop_x, tape.param(&params.weights[1])));
            if (spec.inter_activation) h1 = tape.relu(h1);
            NodeId h2 = tape.add(tape.matmul(h1, tape.param(&params.weights[2])),
                                 tape.matmul(tape.spmm(in.prop, h1), tape.param(&params.weights[3])));
            return h2;
        }
    }
    throw ContractError("encode_on_tape: unknown encoder kind");
}

DenseMatrix encode(const EncoderSpec& spec, const EncoderParams& params, const SparseAdj& adj,
                   const DenseMatrix& x_tilde) {
    switch (spec.kind) {
        case EncoderKind::GCN:
            return matmul(spmm(normalize_sym(adj), x_tilde), params.weights[0].value);
        case EncoderKind::GIN: {
            DenseMatrix h = matmul(spmm(gin_prop(adj, spec.gin_eps), x_tilde), params.weights[0].value);
            for (std::size_t l = 1; l < params.weights.size(); ++l) {
                if (spec.inter_activation)
                    for (double& v : h.data) v = v > 0.0 ? v : 0.0;
                h = matmul(h, params.weights[l].value);
            }
            return h;
        }
        case EncoderKind::MLP:
            return matmul(x_tilde, params.weights[0].value);
        case EncoderKind::SAGE: {
            SparseAdj prop = normalize_row(adj, /*add_self_loops=*/false);
            DenseMatrix h1 = add(matmul(x_tilde, params.weights[0].value),
                                 matmul(spmm(prop, x_tilde), params.weights[1].value));
            if (spec.inter_activation)
                for (double& v : h1.data) v = v > 0.0 ? v : 0.0;
            return add(matmul(h1, params.weights[2].value),
                       matmul(spmm(prop, h1), params.weights[3].value));
        }
    }
    throw ContractError("encode: unknown encoder kind");
}

std::vector<double> predict_head(const ParamTensor& w, const ParamTensor& b, const DenseMatrix& h) {
    if (h.cols != w.value.rows) {
        throw ContractError("predict_head: H width " + std::to_string(h.cols) +
                            " does not match head input " + std::to_string(w.value.rows));
    }
    DenseMatrix z = matmul(h, w.value);
    std::vector<double> scores(h.rows);
    for (std::size_t i = 0; i < h.rows; ++i) {
        double x = z.at(i, 0) + b.value.at(0, 0);
        scores[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    }
    return scores;
}

NodeId head_on_tape(Tape& tape, ParamTensor& w, ParamTensor& b, NodeId h, std::size_t rows) {
    NodeId z = tape.matmul(h, tape.param(&w));
    NodeId bias = tape.broadcast_row(tape.param(&b), rows);
    return tape.sigmoid(tape.add(z, bias));
}

ModelBundle init_bundle(const EncoderSpec& spec, std::size_t d, double tau, MaskMode mode,
                        std::uint64_t seed) {
    SplitMix64 rng = rng_stream(seed, rng_tag::init);
    ModelBundle b;
    b.spec = spec;
    b.sampler = MaskSampler(d, tau, mode);
    b.encoder = init_encoder(spec, d, rng);
    b.cls_w = ParamTensor(glorot_uniform(spec.hidden, 1, rng));
    b.cls_b = ParamTensor(DenseMatrix(1, 1));
    b.disc_w = ParamTensor(glorot_uniform(spec.hidden, 1, rng));
    b.disc_b = ParamTensor(DenseMatrix(1, 1));
    b.opt_g = AdamState(b.params_generator());
    b.opt_f = AdamState(b.params_encoder());
    b.opt_c = AdamState(b.params_classifier());
    b.opt_d = AdamState(b.params_discriminator());
    return b;
}

namespace {

nlohmann::json matrix_to_json(const DenseMatrix& m) {
    return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

DenseMatrix matrix_from_json(const nlohmann::json& j) {
    return DenseMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                       j.at("data").get<std::vector<double>>());
}

}  // namespace

void save_checkpoint(const ModelBundle& bundle, std::uint64_t rng_state, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["spec"] = {{"kind", to_string(bundle.spec.kind)},
                 {"hidden", bundle.spec.hidden},
                 {"dropout", bundle.spec.dropout},
                 {"gin_eps", bundle.spec.gin_eps},
                 {"gin_mlp_layers", bundle.spec.gin_mlp_layers},
                 {"inter_activation", bundle.spec.inter_activation}};
    j["sampler"] = {{"logits", matrix_to_json(bundle.sampler.logits.value)},
                    {"tau", bundle.sampler.tau},
                    {"mode", to_string(bundle.sampler.mode)}};
    nlohmann::json weights = nlohmann::json::array();
    for (const auto& w : bundle.encoder.weights) weights.push_back(matrix_to_json(w.value));
    j["encoder_weights"] = weights;
    j["cls_w"] = matrix_to_json(bundle.cls_w.value);
    j["cls_b"] = matrix_to_json(bundle.cls_b.value);
    j["disc_w"] = matrix_to_json(bundle.disc_w.value);
    j["disc_b"] = matrix_to_json(bundle.disc_b.value);
    // 64-bit state as a string: JSON numbers cannot hold it exactly
    j["rng_state"] = std::to_string(rng_state);
    std::ofstream out(path);
    if (!out) throw InputError("save_checkpoint: cannot write " + path);
    out << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("load_checkpoint: cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError("load_checkpoint: invalid JSON in " + path + ": " + e.what());
    }
    if (j.value("format_version", 0) != 1) {
        throw InputError("load_checkpoint: unsupported format version in " + path);
    }
    Checkpoint ck;
    EncoderSpec spec;
    spec.kind = encoder_kind_from_string(j["spec"]["kind"].get<std::string>());
    spec.hidden = j["spec"]["hidden"].get<std::size_t>();
    spec.dropout = j["spec"]["dropout"].get<double>();
    spec.gin_eps = j["spec"]["gin_eps"].get<double>();
    spec.gin_mlp_layers = j["spec"]["gin_mlp_layers"].get<std::size_t>();
    spec.inter_activation = j["spec"]["inter_activation"].get<bool>();
    ck.bundle.spec = spec;
    ck.bundle.sampler.logits = ParamTensor(matrix_from_json(j["sampler"]["logits"]));
    ck.bundle.sampler.tau = j["sampler"]["tau"].get<double>();
    ck.bundle.sampler.mode = mask_mode_from_string(j["sampler"]["mode"].get<std::string>());
    for (const auto& w : j["encoder_weights"]) {
        ck.bundle.encoder.weights.emplace_back(matrix_from_json(w));
    }
    ck.bundle.cls_w = ParamTensor(matrix_from_json(j["cls_w"]));
    ck.bundle.cls_b = ParamTensor(matrix_from_json(j["cls_b"]));
    ck.bundle.disc_w = ParamTensor(matrix_from_json(j["disc_w"]));
    ck.bundle.disc_b = ParamTensor(matrix_from_json(j["disc_b"]));
    ck.bundle.opt_g = AdamState(ck.bundle.params_generator());
    ck.bundle.opt_f = AdamState(ck.bundle.params_encoder());
    ck.bundle.opt_c = AdamState(ck.bundle.params_classifier());
    ck.bundle.opt_d = AdamState(ck.bundle.params_discriminator());
    ck.rng_state = std::stoull(j["rng_state"].get<std::string>());
    return ck;
}

}  // namespace fairvgnn
