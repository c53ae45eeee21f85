#include "fairvgnn/training.hpp"

#include <algorithm>
#include <cmath>

#include "fairvgnn/errors.hpp"
#include "fairvgnn/stats.hpp"

namespace fairvgnn {

ClampMode clamp_mode_from_string(const std::string& s) {
    if (s == "adaptive") return ClampMode::Adaptive;
    if (s == "plain") return ClampMode::Plain;
    if (s == "spectral") return ClampMode::Spectral;
    if (s == "none") return ClampMode::None;
    throw InputError("unknown clamp mode '" + s + "' (expected adaptive|plain|spectral|none)");
}

const char* to_string(ClampMode m) {
    switch (m) {
        case ClampMode::Adaptive: return "adaptive";
        case ClampMode::Plain: return "plain";
        case ClampMode::Spectral: return "spectral";
        case ClampMode::None: return "none";
    }
    return "?";
}

MaskStrategy strategy_from_string(const std::string& s) {
    if (s == "S0" || s == "s0") return MaskStrategy::S0;
    if (s == "S1" || s == "s1") return MaskStrategy::S1;
    if (s == "S2" || s == "s2") return MaskStrategy::S2;
    throw InputError("unknown masking strategy '" + s + "' (expected S0|S1|S2)");
}

const char* to_string(MaskStrategy s) {
    switch (s) {
        case MaskStrategy::S0: return "S0";
        case MaskStrategy::S1: return "S1";
        case MaskStrategy::S2: return "S2";
    }
    return "?";
}

void TrainConfig::validate() const {
    if (K < 1) throw ContractError("TrainConfig: K must be at least 1");
    if (!(lr_g > 0.0) || !(lr_d > 0.0) || !(lr_c > 0.0) || !(lr_f > 0.0)) {
        throw ContractError("TrainConfig: learning rates must be positive");
    }
    if (!(tau > 0.0)) throw ContractError("TrainConfig: tau must be positive");
    if (!(epsilon > 0.0)) throw ContractError("TrainConfig: epsilon must be positive");
    if (alpha < 0.0) throw ContractError("TrainConfig: alpha must be nonnegative");
}

// ---------------------------------------------------------------------------
// losses
// ---------------------------------------------------------------------------

namespace {

double guarded_log(double x) { return std::log(x < kLogEps ? kLogEps : x); }

}  // namespace

double loss_discriminator(const std::vector<std::uint8_t>& sensitive,
                          const std::vector<double>& disc_scores) {
    if (sensitive.size() != disc_scores.size()) throw ContractError("loss_discriminator: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < disc_scores.size(); ++i) {
        double s = sensitive[i] ? 1.0 : 0.0;
        acc += s * guarded_log(disc_scores[i]) + (1.0 - s) * guarded_log(1.0 - disc_scores[i]);
    }
    return acc / static_cast<double>(disc_scores.size());
}

double loss_generator(const std::vector<double>& disc_scores, const std::vector<double>& mask,
                      double alpha) {
    double mse = 0.0;
    for (double s : disc_scores) mse += (s - 0.5) * (s - 0.5);
    mse /= static_cast<double>(disc_scores.size());
    double pen = 0.0;
    for (double m : mask) pen += (m - 1.0) * (m - 1.0);
    return mse + alpha * pen;
}

double loss_classifier(const std::vector<std::uint8_t>& y, const std::vector<double>& class_scores) {
    if (y.size() != class_scores.size()) throw ContractError("loss_classifier: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double yi = y[i] ? 1.0 : 0.0;
        acc += yi * guarded_log(class_scores[i]) + (1.0 - yi) * guarded_log(1.0 - class_scores[i]);
    }
    return -acc / static_cast<double>(y.size());
}

// ---------------------------------------------------------------------------
// weight regularizers
// ---------------------------------------------------------------------------

void adaptive_clamp(DenseMatrix& w, const std::vector<double>& p, double epsilon) {
    if (p.size() != w.cols) {
        throw ContractError("adaptive_clamp: p has " + std::to_string(p.size()) +
                            " entries but W has " + std::to_string(w.cols) + " input channels");
    }
    if (!(epsilon > 0.0)) throw ContractError("adaptive_clamp: epsilon must be positive");
    for (std::size_t i = 0; i < w.rows; ++i) {
        for (std::size_t j = 0; j < w.cols; ++j) {
            double limit = epsilon * p[j];
            double& v = w.at(i, j);
            if (v > limit) v = limit;
            else if (v < -limit) v = -limit;
        }
    }
}

void adaptive_clamp_rows(DenseMatrix& w, const std::vector<double>& p, double epsilon) {
    if (p.size() != w.rows) {
        throw ContractError("adaptive_clamp_rows: p has " + std::to_string(p.size()) +
                            " entries but W has " + std::to_string(w.rows) + " input channels");
    }
    if (!(epsilon > 0.0)) throw ContractError("adaptive_clamp_rows: epsilon must be positive");
    for (std::size_t i = 0; i < w.rows; ++i) {
        double limit = epsilon * p[i];
        for (std::size_t j = 0; j < w.cols; ++j) {
            double& v = w.at(i, j);
            if (v > limit) v = limit;
            else if (v < -limit) v = -limit;
        }
    }
}

void plain_clamp(DenseMatrix& w, double epsilon) {
    if (!(epsilon > 0.0)) throw ContractError("plain_clamp: epsilon must be positive");
    for (double& v : w.data) {
        if (v > epsilon) v = epsilon;
        else if (v < -epsilon) v = -epsilon;
    }
}

DenseMatrix spectral_normalize(const DenseMatrix& w, std::size_t iterations) {
    if (iterations < 1) throw ContractError("spectral_normalize: need at least one iteration");
    if (max_abs(w) == 0.0) return w;

    // deterministic start, slightly tilted so no singular vector is missed
    std::vector<double> v(w.cols);
    for (std::size_t j = 0; j < w.cols; ++j) v[j] = 1.0 + 1e-3 * static_cast<double>(j);
    double sigma = 0.0;
    std::vector<double> u(w.rows);
    for (std::size_t it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < w.rows; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < w.cols; ++j) acc += w.at(i, j) * v[j];
            u[i] = acc;
        }
        double un = 0.0;
        for (double x : u) un += x * x;
        un = std::sqrt(un);
        if (un == 0.0) return w;  // start vector fell in the null space
        for (double& x : u) x /= un;
        for (std::size_t j = 0; j < w.cols; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < w.rows; ++i) acc += w.at(i, j) * u[i];
            v[j] = acc;
        }
        sigma = 0.0;
        for (double x : v) sigma += x * x;
        sigma = std::sqrt(sigma);
        if (sigma == 0.0) return w;
        for (double& x : v) x /= sigma;
    }
    return scale(w, 1.0 / sigma);
}

// ---------------------------------------------------------------------------
// Theorem-2 bound
// ---------------------------------------------------------------------------

Theorem2Result theorem2_bound(const DenseMatrix& w_first_layer, const std::vector<double>& p,
                              double epsilon, const std::vector<double>& delta_mu, double chi,
                              const std::vector<std::size_t>& sensitive_set) {
    const std::size_t d = w_first_layer.cols;
    if (p.size() != d || delta_mu.size() != d) {
        throw ContractError("theorem2_bound: p/delta_mu length must match W input channels");
    }
    for (std::size_t s : sensitive_set) {
        if (s >= d) throw ContractError("theorem2_bound: sensitive index out of range");
    }
    Theorem2Result out;

    // exact: ||(2 chi - 1) W dmu||_2
    double norm2 = 0.0;
    for (std::size_t i = 0; i < w_first_layer.rows; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += w_first_layer.at(i, j) * delta_mu[j];
        norm2 += acc * acc;
    }
    out.exact = std::fabs(2.0 * chi - 1.0) * std::sqrt(norm2);

    // bound: per output unit the inner sum over sensitive then non-sensitive
    // channels of eps * p_j * dmu_j
    std::vector<bool> is_sens(d, false);
    for (std::size_t s : sensitive_set) is_sens[s] = true;
    double inner = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        if (is_sens[j]) inner += epsilon * p[j] * delta_mu[j];
    for (std::size_t j = 0; j < d; ++j)
        if (!is_sens[j]) inner += epsilon * p[j] * delta_mu[j];
    double acc = 0.0;
    for (std::size_t i = 0; i < w_first_layer.rows; ++i) acc += inner * inner;
    out.bound = (2.0 * chi - 1.0) * std::sqrt(acc);
    return out;
}

double theorem2_empirical_norm(const GraphDataset& graph, const DenseMatrix& w_first_layer) {
    if (w_first_layer.cols != graph.d()) {
        throw ContractError("theorem2_empirical_norm: W input width must match feature count");
    }
    SparseAdj prop = normalize_row(graph.adj, /*add_self_loops=*/true);
    DenseMatrix z = spmm(prop, graph.X);
    DenseMatrix h = matmul(z, transpose(w_first_layer));  // n x d1
    std::vector<double> mean1(h.cols, 0.0), mean0(h.cols, 0.0);
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < h.rows; ++i) {
        if (graph.S[i]) {
            ++n1;
            for (std::size_t j = 0; j < h.cols; ++j) mean1[j] += h.at(i, j);
        } else {
            ++n0;
            for (std::size_t j = 0; j < h.cols; ++j) mean0[j] += h.at(i, j);
        }
    }
    if (n0 == 0 || n1 == 0) throw InputError("theorem2_empirical_norm: a group is empty");
    double norm2 = 0.0;
    for (std::size_t j = 0; j < h.cols; ++j) {
        double diff = mean1[j] / static_cast<double>(n1) - mean0[j] / static_cast<double>(n0);
        norm2 += diff * diff;
    }
    return std::sqrt(norm2);
}

// ---------------------------------------------------------------------------
// training helpers
// ---------------------------------------------------------------------------

namespace {

DenseMatrix take_rows(const DenseMatrix& m, const std::vector<std::size_t>& idx) {
    DenseMatrix out(idx.size(), m.cols);
    for (std::size_t t = 0; t < idx.size(); ++t)
        for (std::size_t j = 0; j < m.cols; ++j) out.at(t, j) = m.at(idx[t], j);
    return out;
}

void fill_dropout(DenseMatrix& m, double rate, SplitMix64& rng) {
    if (rate <= 0.0) {
        m.fill(1.0);
        return;
    }
    const double keep = 1.0 - rate;
    const double inv = 1.0 / keep;
    for (double& v : m.data) v = rng.next_double() < keep ? inv : 0.0;
}

DenseMatrix mask_cols(const DenseMatrix& m, const std::vector<double>& mask) {
    DenseMatrix out = m;
    for (std::size_t i = 0; i < out.rows; ++i)
        for (std::size_t j = 0; j < out.cols; ++j) out.at(i, j) *= mask[j];
    return out;
}

void relu_inplace(DenseMatrix& m) {
    for (double& v : m.data) v = v > 0.0 ? v : 0.0;
}

/// Plain-value forward using the precomputed operators; column masking
/// commutes with the fixed propagation, so no spmm over the feature width.
DenseMatrix encode_with_operators(const EncoderSpec& spec, const EncoderParams& params,
                                  const EncoderOperators& ops, const std::vector<double>& mask) {
    switch (spec.kind) {
        case EncoderKind::GCN:
            return matmul(mask_cols(ops.prop_x, mask), params.weights[0].value);
        case EncoderKind::GIN: {
            DenseMatrix h = matmul(mask_cols(ops.prop_x, mask), params.weights[0].value);
            for (std::size_t l = 1; l < params.weights.size(); ++l) {
                if (spec.inter_activation) relu_inplace(h);
                h = matmul(h, params.weights[l].value);
            }
            return h;
        }
        case EncoderKind::MLP:
            return matmul(mask_cols(ops.x, mask), params.weights[0].value);
        case EncoderKind::SAGE: {
            DenseMatrix h1 = add(matmul(mask_cols(ops.x, mask), params.weights[0].value),
                                 matmul(mask_cols(ops.prop_x, mask), params.weights[1].value));
            if (spec.inter_activation) relu_inplace(h1);
            return add(matmul(h1, params.weights[2].value),
                       matmul(spmm(ops.prop, h1), params.weights[3].value));
        }
    }
    throw ContractError("encode_with_operators: unknown encoder kind");
}

/// -mean( y log s + (1-y) log(1-s) ) as tape nodes; y and 1-y are inputs.
NodeId bce_on_tape(Tape& t, NodeId scores, NodeId y, NodeId one_minus_y, NodeId ones) {
    NodeId log_s = t.log(scores);
    NodeId log_1ms = t.log(t.add(ones, t.affine(scores, -1.0, 0.0)));
    NodeId joint = t.add(t.mul(y, log_s), t.mul(one_minus_y, log_1ms));
    return t.affine(t.mean_all(joint), -1.0, 0.0);
}

/// Weighted variant (weights already include the 1/count factor).
NodeId bce_weighted_on_tape(Tape& t, NodeId scores, NodeId y, NodeId one_minus_y, NodeId ones,
                            NodeId weights) {
    NodeId log_s = t.log(scores);
    NodeId log_1ms = t.log(t.add(ones, t.affine(scores, -1.0, 0.0)));
    NodeId joint = t.add(t.mul(y, log_s), t.mul(one_minus_y, log_1ms));
    return t.affine(t.sum_all(t.mul(joint, weights)), -1.0, 0.0);
}

NodeId mean_of(Tape& t, const std::vector<NodeId>& terms) {
    NodeId acc = terms[0];
    for (std::size_t i = 1; i < terms.size(); ++i) acc = t.add(acc, terms[i]);
    return t.affine(acc, 1.0 / static_cast<double>(terms.size()), 0.0);
}

DenseMatrix label_col(const std::vector<std::uint8_t>& v, bool invert) {
    DenseMatrix out(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = v[i] ? 1.0 : 0.0;
        out.at(i, 0) = invert ? 1.0 - x : x;
    }
    return out;
}

void clamp_first_layer(ModelBundle& bundle, ClampMode mode, const std::vector<double>& p,
                       double epsilon) {
    for (std::size_t idx : bundle.encoder.first_layer_indices(bundle.spec)) {
        DenseMatrix& w = bundle.encoder.weights[idx].value;
        switch (mode) {
            case ClampMode::Adaptive: adaptive_clamp_rows(w, p, epsilon); break;
            case ClampMode::Plain: plain_clamp(w, epsilon); break;
            case ClampMode::Spectral: w = spectral_normalize(w, 50); break;
            case ClampMode::None: break;
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// the adversarial loop
// ---------------------------------------------------------------------------

TrainOutcome train_fairvgnn_detailed(const GraphDataset& ds_in, const TrainConfig& cfg,
                                     const TrainHooks* hooks) {
    cfg.validate();
    GraphDataset ds = ds_in;
    ds.X = minmax_normalize(ds.X, {ds.sensitive_channel});
    Splits splits = ds.has_splits ? ds.splits : make_splits(ds.Y, cfg.seed, cfg.split_ratios);

    const std::size_t n = ds.n();
    const std::size_t d = ds.d();
    const std::size_t hidden = cfg.encoder.hidden;
    const std::size_t K = cfg.K;
    const EncoderKind kind = cfg.encoder.kind;

    ModelBundle bundle = init_bundle(cfg.encoder, d, cfg.tau, cfg.mask_mode, cfg.seed);
    EncoderOperators ops = build_operators(cfg.encoder, ds.adj, ds.X);

    SplitMix64 gumbel_rng = rng_stream(cfg.seed, rng_tag::gumbel);
    SplitMix64 dropout_rng = rng_stream(cfg.seed, rng_tag::dropout);

    const bool needs_prop = kind != EncoderKind::MLP;
    const bool needs_x = kind == EncoderKind::MLP || kind == EncoderKind::SAGE;
    // single-propagation encoders can train the classifier on train rows only
    const bool sliced = kind != EncoderKind::SAGE;
    const std::vector<std::size_t>& train_idx = splits.train;
    const std::size_t rows_c = sliced ? train_idx.size() : n;

    const DenseMatrix prop_x_c =
        needs_prop ? (sliced ? take_rows(ops.prop_x, train_idx) : ops.prop_x) : DenseMatrix();
    const DenseMatrix x_c = needs_x ? (sliced ? take_rows(ops.x, train_idx) : ops.x) : DenseMatrix();

    // ---- discriminator phase tape: trains Theta_d on frozen encodings ----
    Tape dtape;
    std::vector<NodeId> d_h_in(K);
    NodeId d_loss = kNoNode;
    {
        NodeId s_in = dtape.input(label_col(ds.S, false));
        NodeId one_minus_s = dtape.input(label_col(ds.S, true));
        NodeId ones = dtape.input(DenseMatrix::full(n, 1, 1.0));
        std::vector<NodeId> terms;
        for (std::size_t k = 0; k < K; ++k) {
            d_h_in[k] = dtape.input(DenseMatrix(n, hidden));
            NodeId scores = head_on_tape(dtape, bundle.disc_w, bundle.disc_b, d_h_in[k], n);
            terms.push_back(bce_on_tape(dtape, scores, s_in, one_minus_s, ones));
        }
        d_loss = mean_of(dtape, terms);
    }

    // ---- classifier phase tape: trains Theta_c and Theta_f ----
    Tape ctape;
    std::vector<NodeId> c_prop_in(K, kNoNode), c_x_in(K, kNoNode), c_drop_in(K);
    NodeId c_loss = kNoNode;
    {
        std::vector<std::uint8_t> y_rows;
        if (sliced) {
            for (std::size_t i : train_idx) y_rows.push_back(ds.Y[i]);
        } else {
            y_rows = ds.Y;
        }
        NodeId y_in = ctape.input(label_col(y_rows, false));
        NodeId one_minus_y = ctape.input(label_col(y_rows, true));
        NodeId ones = ctape.input(DenseMatrix::full(rows_c, 1, 1.0));
        NodeId w_in = kNoNode;
        if (!sliced) {
            DenseMatrix w_train(n, 1);
            for (std::size_t i : train_idx) w_train.at(i, 0) = 1.0 / static_cast<double>(train_idx.size());
            w_in = ctape.input(std::move(w_train));
        }
        std::vector<NodeId> terms;
        for (std::size_t k = 0; k < K; ++k) {
            EncoderTapeInputs in;
            if (needs_prop) {
                c_prop_in[k] = ctape.input(DenseMatrix(rows_c, d));
                in.prop_x = c_prop_in[k];
            }
            if (needs_x) {
                c_x_in[k] = ctape.input(DenseMatrix(rows_c, d));
                in.x = c_x_in[k];
            }
            in.prop = &ops.prop;
            NodeId h = encode_on_tape(ctape, cfg.encoder, bundle.encoder, in);
            c_drop_in[k] = ctape.input(DenseMatrix::full(rows_c, hidden, 1.0));
            NodeId hd = ctape.mul(h, c_drop_in[k]);
            NodeId scores = head_on_tape(ctape, bundle.cls_w, bundle.cls_b, hd, rows_c);
            terms.push_back(sliced ? bce_on_tape(ctape, scores, y_in, one_minus_y, ones)
                                   : bce_weighted_on_tape(ctape, scores, y_in, one_minus_y, ones, w_in));
        }
        c_loss = mean_of(ctape, terms);
    }

    // ---- generator phase tape: trains Theta_g and Theta_f through the
    //      frozen discriminator ----
    Tape gtape;
    std::vector<MaskTapeNodes> g_mask(K);
    std::vector<NodeId> g_drop_in(K);
    NodeId g_disc_w_in = kNoNode, g_disc_b_in = kNoNode;
    NodeId g_loss = kNoNode;
    {
        NodeId prop_x_in = needs_prop ? gtape.input(ops.prop_x) : kNoNode;
        NodeId x_in = needs_x ? gtape.input(ops.x) : kNoNode;
        g_disc_w_in = gtape.input(bundle.disc_w.value);
        g_disc_b_in = gtape.input(bundle.disc_b.value);
        std::vector<NodeId> terms;
        for (std::size_t k = 0; k < K; ++k) {
            MaskDraw zero_draw;  // placeholder values; refreshed every epoch
            zero_draw.noise_diff = DenseMatrix(1, d);
            zero_draw.hard.assign(d, 1.0);
            zero_draw.soft.assign(d, 0.5);
            zero_draw.value = cfg.mask_mode == MaskMode::Hard ? zero_draw.hard : zero_draw.soft;
            g_mask[k] = mask_on_tape(gtape, bundle.sampler, zero_draw);
            EncoderTapeInputs in;
            NodeId bc = gtape.broadcast_row(g_mask[k].mask, n);
            if (needs_prop) in.prop_x = gtape.mul(bc, prop_x_in);
            if (needs_x) in.x = gtape.mul(bc, x_in);
            in.prop = &ops.prop;
            NodeId h = encode_on_tape(gtape, cfg.encoder, bundle.encoder, in);
            g_drop_in[k] = gtape.input(DenseMatrix::full(n, hidden, 1.0));
            NodeId hd = gtape.mul(h, g_drop_in[k]);
            NodeId z = gtape.add(gtape.matmul(hd, g_disc_w_in), gtape.broadcast_row(g_disc_b_in, n));
            NodeId scores = gtape.sigmoid(z);
            NodeId mse = gtape.mean_all(gtape.square(gtape.affine(scores, 1.0, -0.5)));
            NodeId pen = gtape.affine(gtape.sum_all(gtape.square(gtape.affine(g_mask[k].mask, 1.0, -1.0))),
                                      cfg.alpha, 0.0);
            terms.push_back(gtape.add(mse, pen));
        }
        g_loss = mean_of(gtape, terms);
    }

    TrainReport report;
    report.homophily = edge_homophily(ds.adj, ds.S);

    auto check_finite_loss = [](double v, const char* phase, std::size_t epoch) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string("training diverged: ") + phase +
                               " loss non-finite at epoch " + std::to_string(epoch));
        }
    };

    DenseMatrix drop_buf;
    std::vector<MaskDraw> draws(K);
    for (std::size_t epoch = 0; epoch < cfg.total_epochs; ++epoch) {
        // 1. sample this epoch's K fair views
        for (std::size_t k = 0; k < K; ++k) draws[k] = draw_mask(bundle.sampler, gumbel_rng);

        // 2. discriminator ascent on stop-gradient encodings
        double ld_trace = 0.0;
        if (cfg.epochs_d > 0) {
            for (std::size_t k = 0; k < K; ++k) {
                DenseMatrix h = encode_with_operators(cfg.encoder, bundle.encoder, ops, draws[k].value);
                drop_buf = DenseMatrix(n, hidden);
                fill_dropout(drop_buf, cfg.encoder.dropout, dropout_rng);
                for (std::size_t i = 0; i < h.size(); ++i) h.data[i] *= drop_buf.data[i];
                dtape.mutable_input(d_h_in[k]) = std::move(h);
            }
            for (std::size_t step = 0; step < cfg.epochs_d; ++step) {
                dtape.forward(false);
                double lv = dtape.value(d_loss).data[0];
                check_finite_loss(lv, "discriminator", epoch);
                ld_trace = -lv;  // reported as the maximized objective
                dtape.backward(d_loss);
                adam_step(bundle.params_discriminator(), bundle.opt_d, cfg.lr_d);
            }
        }
        report.loss_d.push_back(ld_trace);

        // 3. classifier phase
        double lc_trace = 0.0;
        if (cfg.epochs_c > 0) {
            for (std::size_t k = 0; k < K; ++k) {
                if (needs_prop) ctape.mutable_input(c_prop_in[k]) = mask_cols(prop_x_c, draws[k].value);
                if (needs_x) ctape.mutable_input(c_x_in[k]) = mask_cols(x_c, draws[k].value);
            }
            for (std::size_t step = 0; step < cfg.epochs_c; ++step) {
                for (std::size_t k = 0; k < K; ++k)
                    fill_dropout(ctape.mutable_input(c_drop_in[k]), cfg.encoder.dropout, dropout_rng);
                ctape.forward(false);
                double lv = ctape.value(c_loss).data[0];
                check_finite_loss(lv, "classifier", epoch);
                lc_trace = lv;
                ctape.backward(c_loss);
                adam_step(bundle.params_classifier(), bundle.opt_c, cfg.lr_c);
                adam_step(bundle.params_encoder(), bundle.opt_f, cfg.lr_f);
            }
        }
        report.loss_c.push_back(lc_trace);

        // 4. generator phase
        double lg_trace = 0.0;
        if (cfg.epochs_g > 0) {
            for (std::size_t k = 0; k < K; ++k) {
                gtape.mutable_input(g_mask[k].noise_in) = draws[k].noise_diff;
                if (g_mask[k].hard_in != kNoNode) {
                    DenseMatrix hard(1, d);
                    for (std::size_t j = 0; j < d; ++j) hard.at(0, j) = draws[k].hard[j];
                    gtape.mutable_input(g_mask[k].hard_in) = std::move(hard);
                }
            }
            gtape.mutable_input(g_disc_w_in) = bundle.disc_w.value;
            gtape.mutable_input(g_disc_b_in) = bundle.disc_b.value;
            for (std::size_t step = 0; step < cfg.epochs_g; ++step) {
                for (std::size_t k = 0; k < K; ++k)
                    fill_dropout(gtape.mutable_input(g_drop_in[k]), cfg.encoder.dropout, dropout_rng);
                gtape.forward(false);
                double lv = gtape.value(g_loss).data[0];
                check_finite_loss(lv, "generator", epoch);
                lg_trace = lv;
                gtape.backward(g_loss);
                adam_step(bundle.params_generator(), bundle.opt_g, cfg.lr_g);
                adam_step(bundle.params_encoder(), bundle.opt_f, cfg.lr_f);
            }
        }
        report.loss_g.push_back(lg_trace);

        // 5. clamp the first encoder layer with p = mean of the K masks
        std::vector<double> p_mean(d, 0.0);
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t j = 0; j < d; ++j) p_mean[j] += draws[k].value[j];
        for (double& v : p_mean) v /= static_cast<double>(K);
        clamp_first_layer(bundle, cfg.clamp_mode, p_mean, cfg.epsilon);

        // 6. discriminator accuracy on the current encodings (no dropout)
        {
            double correct = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                DenseMatrix h = encode_with_operators(cfg.encoder, bundle.encoder, ops, draws[k].value);
                std::vector<double> scores = predict_head(bundle.disc_w, bundle.disc_b, h);
                for (std::size_t i = 0; i < n; ++i) {
                    correct += (scores[i] >= 0.5 ? 1 : 0) == (ds.S[i] ? 1 : 0) ? 1.0 : 0.0;
                }
            }
            report.disc_acc.push_back(correct / static_cast<double>(n * K));
        }

        if (hooks && hooks->on_epoch_end) hooks->on_epoch_end(epoch, bundle);
    }

    // final inference on the expected view
    report.keep_prob = bundle.sampler.keep_probability();
    DenseMatrix h_eval = encode_with_operators(cfg.encoder, bundle.encoder, ops, report.keep_prob);
    std::vector<double> scores = predict_head(bundle.cls_w, bundle.cls_b, h_eval);

    std::vector<double> test_scores;
    std::vector<std::uint8_t> test_y, test_s;
    for (std::size_t i : splits.test) {
        test_scores.push_back(scores[i]);
        test_y.push_back(ds.Y[i]);
        test_s.push_back(ds.S[i]);
    }
    report.metrics = evaluate(test_scores, test_y, test_s, 0.5);

    TrainOutcome out;
    out.report = std::move(report);
    out.bundle = std::move(bundle);
    out.splits = std::move(splits);
    return out;
}

TrainReport train_fairvgnn(const GraphDataset& dataset, const TrainConfig& config) {
    return train_fairvgnn_detailed(dataset, config).report;
}

// ---------------------------------------------------------------------------
// masking-strategy baselines
// ---------------------------------------------------------------------------

MetricsRecord run_masking_baseline(const GraphDataset& ds_in, MaskStrategy strategy,
                                   EncoderKind encoder_kind, std::size_t k, bool no_activation,
                                   const BaselineOptions& opts) {
    if (k > ds_in.d()) throw ContractError("run_masking_baseline: k exceeds channel count");
    GraphDataset ds = ds_in;
    ds.X = minmax_normalize(ds.X, {ds.sensitive_channel});
    Splits splits = ds.has_splits ? ds.splits : make_splits(ds.Y, opts.seed, opts.split_ratios);

    EncoderSpec spec;
    spec.kind = encoder_kind;
    spec.hidden = opts.hidden;
    spec.dropout = 0.0;  // probes run without dropout
    spec.inter_activation = !no_activation;

    const std::size_t d = ds.d();
    std::vector<double> mask(d, 1.0);
    if (strategy != MaskStrategy::S0 && k > 0) {
        std::vector<double> rho;
        if (strategy == MaskStrategy::S1) {
            rho = sensitive_correlation(ds.X, ds.S);
        } else {
            SparseAdj prop = encoder_kind == EncoderKind::MLP
                                 ? normalize_sym(ds.adj)
                                 : build_operators(spec, ds.adj, ds.X).prop;
            CorrelationProfile profile = propagated_correlation(ds.X, prop, spec.layers(), ds.S);
            rho.assign(profile.rho.begin() + spec.layers() * profile.channels,
                       profile.rho.begin() + (spec.layers() + 1) * profile.channels);
        }
        for (std::size_t idx : topk_sensitive_channels(rho, k)) mask[idx] = 0.0;
    }

    SplitMix64 init_rng = rng_stream(opts.seed, rng_tag::init);
    EncoderParams enc = init_encoder(spec, d, init_rng);
    ParamTensor head_w(DenseMatrix(spec.hidden, 1));
    {
        double a = std::sqrt(6.0 / static_cast<double>(spec.hidden + 1));
        for (double& v : head_w.value.data) v = init_rng.next_uniform(-a, a);
    }
    ParamTensor head_b(DenseMatrix(1, 1));

    EncoderOperators ops = build_operators(spec, ds.adj, ds.X);
    const bool needs_prop = encoder_kind != EncoderKind::MLP;
    const bool needs_x = encoder_kind == EncoderKind::MLP || encoder_kind == EncoderKind::SAGE;
    const bool sliced = encoder_kind != EncoderKind::SAGE;
    const std::vector<std::size_t>& train_idx = splits.train;
    const std::size_t rows = sliced ? train_idx.size() : ds.n();

    Tape tape;
    NodeId loss = kNoNode;
    {
        std::vector<std::uint8_t> y_rows;
        if (sliced) {
            for (std::size_t i : train_idx) y_rows.push_back(ds.Y[i]);
        } else {
            y_rows = ds.Y;
        }
        NodeId y_in = tape.input(label_col(y_rows, false));
        NodeId one_minus_y = tape.input(label_col(y_rows, true));
        NodeId ones = tape.input(DenseMatrix::full(rows, 1, 1.0));

        EncoderTapeInputs in;
        if (needs_prop) {
            DenseMatrix base = mask_cols(sliced ? take_rows(ops.prop_x, train_idx) : ops.prop_x, mask);
            in.prop_x = tape.input(std::move(base));
        }
        if (needs_x) {
            DenseMatrix base = mask_cols(sliced ? take_rows(ops.x, train_idx) : ops.x, mask);
            in.x = tape.input(std::move(base));
        }
        in.prop = &ops.prop;
        NodeId h = encode_on_tape(tape, spec, enc, in);
        NodeId scores = head_on_tape(tape, head_w, head_b, h, rows);
        if (sliced) {
            loss = bce_on_tape(tape, scores, y_in, one_minus_y, ones);
        } else {
            DenseMatrix w_train(ds.n(), 1);
            for (std::size_t i : train_idx) w_train.at(i, 0) = 1.0 / static_cast<double>(train_idx.size());
            loss = bce_weighted_on_tape(tape, scores, y_in, one_minus_y, ones, tape.input(std::move(w_train)));
        }
    }

    std::vector<ParamTensor*> params = enc.all();
    params.push_back(&head_w);
    params.push_back(&head_b);
    AdamState opt(params);
    for (std::size_t step = 0; step < opts.epochs; ++step) {
        tape.forward(false);
        double lv = tape.value(loss).data[0];
        if (!std::isfinite(lv)) {
            throw NumericError("baseline training diverged at step " + std::to_string(step));
        }
        tape.backward(loss);
        adam_step(params, opt, opts.lr);
    }

    DenseMatrix h_eval = encode_with_operators(spec, enc, ops, mask);
    std::vector<double> scores = predict_head(head_w, head_b, h_eval);
    std::vector<double> test_scores;
    std::vector<std::uint8_t> test_y, test_s;
    for (std::size_t i : splits.test) {
        test_scores.push_back(scores[i]);
        test_y.push_back(ds.Y[i]);
        test_s.push_back(ds.S[i]);
    }
    return evaluate(test_scores, test_y, test_s, 0.5);
}

}  // namespace fairvgnn
