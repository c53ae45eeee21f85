#include "fairvgnn/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "fairvgnn/errors.hpp"
#include "fairvgnn/rng.hpp"

namespace fairvgnn {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& tok, const std::string& file, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw InputError(file + ":" + std::to_string(line_no) + ": cannot parse number '" + tok + "'");
    }
}

std::string format_double(double v) {
    char buf[32];
    // %.17g round-trips any finite double
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

GraphDataset load_dataset(const std::string& dir_path) {
    namespace fs = std::filesystem;
    const std::string nodes_path = dir_path + "/nodes.csv";
    const std::string edges_path = dir_path + "/edges.csv";
    const std::string meta_path = dir_path + "/meta.json";
    for (const std::string& p : {nodes_path, edges_path, meta_path}) {
        if (!fs::exists(p)) throw InputError("load_dataset: missing file " + p);
    }

    nlohmann::json meta;
    {
        std::ifstream in(meta_path);
        try {
            in >> meta;
        } catch (const std::exception& e) {
            throw InputError(meta_path + ": invalid JSON: " + e.what());
        }
    }
    if (!meta.contains("sensitive_col") || !meta.contains("label_col")) {
        throw InputError(meta_path + ": requires sensitive_col and label_col");
    }
    GraphDataset ds;
    ds.name = fs::path(dir_path).filename().string();
    const std::string sensitive_col = meta["sensitive_col"].get<std::string>();
    ds.label_name = meta["label_col"].get<std::string>();
    if (meta.contains("sensitive_binarize")) {
        ds.binarize_rule = meta["sensitive_binarize"].value("rule", "equals");
        ds.binarize_value = meta["sensitive_binarize"].value("value", 1.0);
        if (ds.binarize_rule != "equals" && ds.binarize_rule != "threshold") {
            throw InputError(meta_path + ": unknown binarize rule '" + ds.binarize_rule + "'");
        }
    }

    // nodes.csv: node_id, feature columns..., label column (located by name)
    std::ifstream nodes(nodes_path);
    std::string line;
    if (!std::getline(nodes, line)) throw InputError(nodes_path + ": empty file");
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "node_id") {
        throw InputError(nodes_path + ":1: header must start with node_id");
    }
    std::size_t label_idx = header.size();
    for (std::size_t i = 1; i < header.size(); ++i) {
        if (header[i] == ds.label_name) label_idx = i;
    }
    if (label_idx == header.size()) {
        throw InputError(nodes_path + ": label column '" + ds.label_name + "' not found");
    }
    for (std::size_t i = 1; i < header.size(); ++i) {
        if (i != label_idx) ds.feature_names.push_back(header[i]);
    }
    std::size_t sens_idx = ds.feature_names.size();
    for (std::size_t i = 0; i < ds.feature_names.size(); ++i) {
        if (ds.feature_names[i] == sensitive_col) sens_idx = i;
    }
    if (sens_idx == ds.feature_names.size()) {
        throw InputError(nodes_path + ": sensitive column '" + sensitive_col + "' not found");
    }
    ds.sensitive_channel = sens_idx;

    std::vector<std::vector<double>> feat_rows;
    std::vector<double> labels_raw;
    std::unordered_map<long long, std::size_t> id_to_row;
    std::size_t line_no = 1;
    while (std::getline(nodes, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> toks = split_csv_line(line);
        if (toks.size() != header.size()) {
            throw InputError(nodes_path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " columns, got " + std::to_string(toks.size()));
        }
        double idv = parse_double(toks[0], nodes_path, line_no);
        long long id = static_cast<long long>(idv);
        if (id_to_row.count(id)) {
            throw InputError(nodes_path + ":" + std::to_string(line_no) + ": duplicate node_id " +
                             std::to_string(id));
        }
        id_to_row[id] = feat_rows.size();
        std::vector<double> row;
        row.reserve(header.size() - 2);
        for (std::size_t i = 1; i < toks.size(); ++i) {
            double v = parse_double(toks[i], nodes_path, line_no);
            if (i == label_idx) {
                labels_raw.push_back(v);
            } else {
                row.push_back(v);
            }
        }
        feat_rows.push_back(std::move(row));
    }
    const std::size_t n = feat_rows.size();
    const std::size_t d = ds.feature_names.size();
    if (n == 0) throw InputError(nodes_path + ": no data rows");

    ds.X = DenseMatrix(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) ds.X.at(i, j) = feat_rows[i][j];
    ds.Y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels_raw[i] != 0.0 && labels_raw[i] != 1.0) {
            throw InputError(nodes_path + ": label of node row " + std::to_string(i) +
                             " is not binary: " + format_double(labels_raw[i]));
        }
        ds.Y[i] = labels_raw[i] == 1.0 ? 1 : 0;
    }

    ds.S.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = ds.X.at(i, sens_idx);
        ds.S[i] = ds.binarize_rule == "equals" ? (v == ds.binarize_value ? 1 : 0)
                                               : (v >= ds.binarize_value ? 1 : 0);
    }

    // edges.csv: src,dst node ids
    std::ifstream edges(edges_path);
    if (!std::getline(edges, line)) throw InputError(edges_path + ": empty file");
    EdgeList edge_list;
    line_no = 1;
    while (std::getline(edges, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> toks = split_csv_line(line);
        if (toks.size() != 2) {
            throw InputError(edges_path + ":" + std::to_string(line_no) + ": expected 2 columns");
        }
        long long s = static_cast<long long>(parse_double(toks[0], edges_path, line_no));
        long long t = static_cast<long long>(parse_double(toks[1], edges_path, line_no));
        auto is = id_to_row.find(s);
        auto it = id_to_row.find(t);
        if (is == id_to_row.end() || it == id_to_row.end()) {
            throw InputError(edges_path + ":" + std::to_string(line_no) + ": unknown node id");
        }
        edge_list.emplace_back(is->second, it->second);
    }
    ds.adj = build_csr(edge_list, n, /*undirected=*/true, /*dedup=*/true);

    if (meta.contains("splits")) {
        const auto& js = meta["splits"];
        auto read_idx = [&](const char* key, std::vector<std::size_t>& out) {
            for (const auto& v : js.at(key)) {
                std::size_t idx = v.get<std::size_t>();
                if (idx >= n) throw InputError(meta_path + ": split index out of range");
                out.push_back(idx);
            }
        };
        read_idx("train", ds.splits.train);
        read_idx("val", ds.splits.val);
        read_idx("test", ds.splits.test);
        ds.has_splits = true;
    }
    return ds;
}

void save_dataset(const GraphDataset& ds, const std::string& dir_path) {
    namespace fs = std::filesystem;
    fs::create_directories(dir_path);

    {
        std::ofstream nodes(dir_path + "/nodes.csv");
        nodes << "node_id";
        for (const auto& fn : ds.feature_names) nodes << "," << fn;
        nodes << "," << ds.label_name << "\n";
        for (std::size_t i = 0; i < ds.n(); ++i) {
            nodes << i;
            for (std::size_t j = 0; j < ds.d(); ++j) nodes << "," << format_double(ds.X.at(i, j));
            nodes << "," << int(ds.Y[i]) << "\n";
        }
    }
    {
        std::ofstream edges(dir_path + "/edges.csv");
        edges << "src,dst\n";
        // one line per undirected pair (and per self-loop)
        for (std::size_t i = 0; i < ds.adj.n; ++i) {
            for (std::size_t k = ds.adj.row_ptr[i]; k < ds.adj.row_ptr[i + 1]; ++k) {
                std::size_t j = ds.adj.col_idx[k];
                if (j >= i) edges << i << "," << j << "\n";
            }
        }
    }
    {
        nlohmann::json meta;
        meta["sensitive_col"] = ds.feature_names[ds.sensitive_channel];
        meta["label_col"] = ds.label_name;
        meta["sensitive_binarize"] = {{"rule", ds.binarize_rule}, {"value", ds.binarize_value}};
        if (ds.has_splits) {
            meta["splits"] = {{"train", ds.splits.train}, {"val", ds.splits.val}, {"test", ds.splits.test}};
        }
        std::ofstream out(dir_path + "/meta.json");
        out << meta.dump(2) << "\n";
    }
}

DenseMatrix minmax_normalize(const DenseMatrix& x, const std::vector<std::size_t>& skip_channels) {
    DenseMatrix out = x;
    std::unordered_set<std::size_t> skip(skip_channels.begin(), skip_channels.end());
    for (std::size_t j = 0; j < x.cols; ++j) {
        if (skip.count(j)) continue;
        double lo = x.at(0, j), hi = x.at(0, j);
        for (std::size_t i = 1; i < x.rows; ++i) {
            lo = std::min(lo, x.at(i, j));
            hi = std::max(hi, x.at(i, j));
        }
        if (hi == lo) {
            for (std::size_t i = 0; i < x.rows; ++i) out.at(i, j) = 0.0;
        } else {
            double inv = 2.0 / (hi - lo);
            for (std::size_t i = 0; i < x.rows; ++i) out.at(i, j) = (x.at(i, j) - lo) * inv - 1.0;
        }
    }
    return out;
}

Splits make_splits(const std::vector<std::uint8_t>& y, std::uint64_t seed,
                   const std::array<double, 3>& ratios) {
    double rsum = ratios[0] + ratios[1] + ratios[2];
    if (std::fabs(rsum - 1.0) > 1e-9) throw InputError("make_splits: ratios must sum to 1");
    const std::size_t n = y.size();

    // exact split sizes by largest remainder
    std::array<std::size_t, 3> target{};
    {
        std::array<double, 3> ideal{};
        std::size_t assigned = 0;
        for (int k = 0; k < 3; ++k) {
            ideal[k] = static_cast<double>(n) * ratios[k];
            target[k] = static_cast<std::size_t>(std::floor(ideal[k]));
            assigned += target[k];
        }
        std::array<int, 3> order{0, 1, 2};
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return ideal[a] - std::floor(ideal[a]) > ideal[b] - std::floor(ideal[b]);
        });
        for (std::size_t r = 0; r < n - assigned; ++r) target[order[r % 3]] += 1;
    }

    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t i = 0; i < n; ++i) by_class[y[i] ? 1 : 0].push_back(i);
    for (const auto& cls : by_class) {
        if (!cls.empty() && cls.size() < 3) {
            throw InputError("make_splits: a label class has fewer nodes than splits");
        }
    }

    // controlled rounding of the class-by-split allocation table: respects
    // class totals exactly and split totals exactly, cells within 1 of ideal
    std::array<std::array<std::size_t, 3>, 2> alloc{};
    std::array<std::size_t, 3> col_used{};
    struct Cell {
        double frac;
        int c, k;
    };
    std::vector<Cell> cells;
    std::array<std::size_t, 2> row_left{};
    for (int c = 0; c < 2; ++c) {
        std::size_t nc = by_class[c].size();
        std::size_t used = 0;
        for (int k = 0; k < 3; ++k) {
            double ideal = static_cast<double>(nc) * static_cast<double>(target[k]) / static_cast<double>(n);
            alloc[c][k] = static_cast<std::size_t>(std::floor(ideal));
            used += alloc[c][k];
            col_used[k] += alloc[c][k];
            cells.push_back({ideal - std::floor(ideal), c, k});
        }
        row_left[c] = nc - used;
    }
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.frac > b.frac; });
    for (int pass = 0; pass < 3; ++pass) {
        for (const Cell& cell : cells) {
            if (row_left[cell.c] > 0 && col_used[cell.k] < target[cell.k]) {
                alloc[cell.c][cell.k] += 1;
                row_left[cell.c] -= 1;
                col_used[cell.k] += 1;
            }
        }
    }

    SplitMix64 rng = rng_stream(seed, rng_tag::split);
    Splits out;
    for (int c = 0; c < 2; ++c) {
        auto& cls = by_class[c];
        for (std::size_t i = cls.size(); i > 1; --i) {
            std::size_t j = rng.next_below(i);
            std::swap(cls[i - 1], cls[j]);
        }
        std::size_t pos = 0;
        for (std::size_t t = 0; t < alloc[c][0]; ++t) out.train.push_back(cls[pos++]);
        for (std::size_t t = 0; t < alloc[c][1]; ++t) out.val.push_back(cls[pos++]);
        for (std::size_t t = 0; t < alloc[c][2]; ++t) out.test.push_back(cls[pos++]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

GraphDataset synth_two_gaussian_graph(const SyntheticSpec& spec, std::uint64_t seed) {
    const std::size_t d = spec.mu1.size();
    if (spec.mu2.size() != d || spec.sigma1.size() != d || spec.sigma2.size() != d) {
        throw ContractError("synth_two_gaussian_graph: mu/sigma lengths disagree");
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (!(spec.sigma1[j] > 0.0) || !(spec.sigma2[j] > 0.0)) {
            throw InputError("synth_two_gaussian_graph: std-devs must be positive");
        }
    }
    if (spec.chi < 0.0 || spec.chi > 1.0) throw InputError("synth_two_gaussian_graph: chi outside [0,1]");
    const std::size_t ng = spec.n_per_group;
    if (ng < 2) throw InputError("synth_two_gaussian_graph: need at least 2 nodes per group");
    const std::size_t n = 2 * ng;

    const std::size_t m_total = static_cast<std::size_t>(std::llround(spec.degree * static_cast<double>(n) / 2.0));
    const std::size_t m_same = static_cast<std::size_t>(std::llround(spec.chi * static_cast<double>(m_total)));
    const std::size_t m_cross = m_total - m_same;
    const std::size_t m_same_per_group = m_same / 2;
    const std::size_t max_pairs = ng * (ng - 1) / 2;
    if (m_same_per_group + (m_same % 2) > max_pairs || m_cross > ng * ng) {
        throw InputError("synth_two_gaussian_graph: degree too large for group sizes");
    }

    SplitMix64 rng = rng_stream(seed, rng_tag::synth);

    // nodes [0, ng) are group s1 (sensitive value 1), [ng, 2ng) group s2
    GraphDataset ds;
    ds.name = "synthetic-two-gaussian";
    ds.X = DenseMatrix(n, d + 1);
    ds.S.resize(n);
    ds.feature_names.push_back("group");
    for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("x" + std::to_string(j));
    ds.sensitive_channel = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool s1 = i < ng;
        ds.S[i] = s1 ? 1 : 0;
        ds.X.at(i, 0) = s1 ? 1.0 : 0.0;
        const auto& mu = s1 ? spec.mu1 : spec.mu2;
        const auto& sigma = s1 ? spec.sigma1 : spec.sigma2;
        for (std::size_t j = 0; j < d; ++j) ds.X.at(i, j + 1) = mu[j] + sigma[j] * rng.next_normal();
    }

    // placeholder labels so split machinery stays usable on these graphs
    ds.Y.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.Y[i] = rng.next_double() < 0.5 ? 0 : 1;

    // stub matching with exact same-group edge counts
    std::unordered_set<std::uint64_t> seen;
    EdgeList edges;
    edges.reserve(m_total);
    auto try_add = [&](std::size_t u, std::size_t v) {
        if (u == v) return false;
        if (u > v) std::swap(u, v);
        std::uint64_t key = static_cast<std::uint64_t>(u) * n + v;
        if (!seen.insert(key).second) return false;
        edges.emplace_back(u, v);
        return true;
    };
    for (int g = 0; g < 2; ++g) {
        std::size_t want = m_same_per_group + (g == 0 ? m_same % 2 : 0);
        std::size_t base = g == 0 ? 0 : ng;
        std::size_t added = 0;
        while (added < want) {
            std::size_t u = base + rng.next_below(ng);
            std::size_t v = base + rng.next_below(ng);
            if (try_add(u, v)) ++added;
        }
    }
    {
        std::size_t added = 0;
        while (added < m_cross) {
            std::size_t u = rng.next_below(ng);
            std::size_t v = ng + rng.next_below(ng);
            if (try_add(u, v)) ++added;
        }
    }
    ds.adj = build_csr(edges, n, /*undirected=*/true, /*dedup=*/true);
    return ds;
}

}  // namespace fairvgnn
