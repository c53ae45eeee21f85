#include "fairvgnn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "fairvgnn/errors.hpp"

namespace fairvgnn {

std::vector<double> sensitive_correlation(const DenseMatrix& x, const std::vector<std::uint8_t>& s) {
    if (s.size() != x.rows) throw ContractError("sensitive_correlation: S length mismatch");
    const double n = static_cast<double>(x.rows);
    double mu_s = 0.0;
    for (auto v : s) mu_s += v ? 1.0 : 0.0;
    mu_s /= n;
    double var_s = mu_s * (1.0 - mu_s);  // population variance of a 0/1 vector
    if (var_s == 0.0) throw InputError("sensitive_correlation: sensitive vector is constant");
    const double sd_s = std::sqrt(var_s);

    std::vector<double> rho(x.cols);
    for (std::size_t j = 0; j < x.cols; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) mu += x.at(i, j);
        mu /= n;
        double var = 0.0, cov = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            double c = x.at(i, j) - mu;
            var += c * c;
            cov += c * ((s[i] ? 1.0 : 0.0) - mu_s);
        }
        var /= n;
        cov /= n;
        rho[j] = var == 0.0 ? std::numeric_limits<double>::quiet_NaN() : cov / (std::sqrt(var) * sd_s);
    }
    return rho;
}

CorrelationProfile propagated_correlation(const DenseMatrix& x, const SparseAdj& adj_norm,
                                          std::size_t layers, const std::vector<std::uint8_t>& s) {
    CorrelationProfile profile;
    profile.layers = layers;
    profile.channels = x.cols;
    profile.rho.reserve((layers + 1) * x.cols);

    DenseMatrix cur = x;
    for (std::size_t l = 0; l <= layers; ++l) {
        if (l > 0) cur = spmm(adj_norm, cur);
        std::vector<double> rho = sensitive_correlation(cur, s);
        profile.rho.insert(profile.rho.end(), rho.begin(), rho.end());
    }
    return profile;
}

std::vector<std::size_t> topk_sensitive_channels(const std::vector<double>& rho, std::size_t k) {
    std::vector<std::size_t> defined;
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (!std::isnan(rho[i])) defined.push_back(i);
    if (k > defined.size()) {
        throw ContractError("topk_sensitive_channels: k exceeds defined entries");
    }
    std::stable_sort(defined.begin(), defined.end(), [&](std::size_t a, std::size_t b) {
        double fa = std::fabs(rho[a]), fb = std::fabs(rho[b]);
        if (fa != fb) return fa > fb;
        return a < b;
    });
    defined.resize(k);
    return defined;
}

std::string profile_to_csv(const CorrelationProfile& profile) {
    std::string out = "layer,channel,rho\n";
    char buf[64];
    for (std::size_t l = 0; l <= profile.layers; ++l) {
        for (std::size_t c = 0; c < profile.channels; ++c) {
            double v = profile.at(l, c);
            if (std::isnan(v)) {
                std::snprintf(buf, sizeof(buf), "%zu,%zu,nan\n", l, c);
            } else {
                std::snprintf(buf, sizeof(buf), "%zu,%zu,%.10g\n", l, c, v);
            }
            out += buf;
        }
    }
    return out;
}

}  // namespace fairvgnn
