#include "eas/sparsifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "eas/error.hpp"
#include "eas/projection.hpp"
#include "eas/rng.hpp"

namespace eas {

void validate(const SparsifyConfig& cfg, std::size_t d) {
    if (cfg.k == 0) throw ConfigError("sparsifier: k must be positive");
    if (cfg.k > d) {
        throw ConfigError("sparsifier: k=" + std::to_string(cfg.k) +
                          " exceeds code dimension d=" + std::to_string(d));
    }
    if (cfg.dropout_rate) {
        double p = *cfg.dropout_rate;
        if (!(p >= 0.0 && p < 1.0)) {
            throw ConfigError("sparsifier: dropout rate must lie in [0,1)");
        }
    }
}

std::size_t threshold_rank(std::size_t sample_size, std::size_t k, std::size_t d) {
    if (sample_size == 0) throw ConfigError("threshold_rank: empty sample");
    if (k == 0 || k > d) throw ConfigError("threshold_rank: need 0 < k <= d");
    // Nearest-rank index (1-based) of the 100*(1-k/d)th percentile, computed
    // in integer arithmetic so boundary cases never suffer float rounding.
    std::size_t r = (sample_size * (d - k)) / d + 1;
    if (r > sample_size) r = sample_size;
    return r;
}

ThresholdVector estimate_thresholds(const ProjectionMatrix& W,
                                    const Matrix& calibration, std::size_t k,
                                    std::uint64_t source_seed) {
    if (calibration.rows == 0) {
        throw CalibrationError("estimate_thresholds: empty calibration set");
    }
    if (calibration.cols != W.input_dim) {
        throw ShapeError("estimate_thresholds: calibration has " +
                         std::to_string(calibration.cols) +
                         " columns, expected " + std::to_string(W.input_dim));
    }
    if (k == 0 || k > W.output_dim) {
        throw ConfigError("estimate_thresholds: need 0 < k <= d");
    }
    if (!all_finite(calibration)) {
        throw InputError("estimate_thresholds: calibration contains non-finite values");
    }
    const std::size_t S = calibration.rows;
    const std::size_t d = W.output_dim;
    const std::size_t r = threshold_rank(S, k, d);

    ThresholdVector tv;
    tv.taus.resize(d);
    tv.quantile_level = 1.0 - static_cast<double>(k) / static_cast<double>(d);
    tv.sample_size = S;
    tv.source_seed = source_seed;

    std::vector<double> col(S);
    for (std::size_t j = 0; j < d; ++j) {
        auto w = W.row(j);
        for (std::size_t i = 0; i < S; ++i) {
            col[i] = dot_lr(w, calibration.row(i));
        }
        // r-th smallest (1-based)
        std::nth_element(col.begin(), col.begin() + (r - 1), col.end());
        tv.taus[j] = col[r - 1];
    }
    return tv;
}

namespace {

void check_projection(std::span<const double> p, const ThresholdVector& tau) {
    if (p.size() != tau.dim()) {
        throw ShapeError("sparsify: projection has length " +
                         std::to_string(p.size()) + ", expected " +
                         std::to_string(tau.dim()));
    }
    if (!all_finite(p)) {
        throw InputError("sparsify: projection contains non-finite values");
    }
}

}  // namespace

SparseCode sparsify_binary(std::span<const double> p, const ThresholdVector& tau) {
    check_projection(p, tau);
    SparseCode code;
    code.dim = p.size();
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] >= tau.taus[j]) code.active.push_back(static_cast<std::uint32_t>(j));
    }
    return code;
}

SparseCode sparsify_relu(std::span<const double> p, const ThresholdVector& tau) {
    check_projection(p, tau);
    SparseCode code;
    code.dim = p.size();
    for (std::size_t j = 0; j < p.size(); ++j) {
        double v = p[j] - tau.taus[j];
        if (v > 0.0) {
            code.active.push_back(static_cast<std::uint32_t>(j));
            code.values.push_back(v);
        }
    }
    return code;
}

SparseCode sparsify_topk(std::span<const double> p, std::size_t k, TieRule tie,
                         bool keep_values) {
    (void)tie;  // lowest_index is the only rule
    if (p.empty()) throw ShapeError("sparsify_topk: empty projection");
    if (!all_finite(p)) {
        throw InputError("sparsify_topk: projection contains non-finite values");
    }
    if (k == 0 || k > p.size()) {
        throw ConfigError("sparsify_topk: need 0 < k <= d");
    }
    std::vector<std::uint32_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0u);
    // Order by value descending; ties broken toward the lower index so the
    // selection is deterministic.
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        if (p[a] != p[b]) return p[a] > p[b];
        return a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), better);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());

    SparseCode code;
    code.dim = p.size();
    code.active = std::move(idx);
    if (keep_values) {
        code.values.reserve(k);
        for (std::uint32_t j : code.active) code.values.push_back(p[j]);
    }
    return code;
}

SparseCode apply_dropout(const SparseCode& code, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw ConfigError("apply_dropout: rate must lie in [0,1)");
    }
    if (rate == 0.0) return code;
    SparseCode out;
    out.dim = code.dim;
    Rng rng(derive_seed(seed, 0x64726f70));
    const bool vals = code.has_values();
    for (std::size_t i = 0; i < code.active.size(); ++i) {
        // uniform() is in (0,1], so P(keep) = 1 - rate exactly
        if (rng.uniform() > rate) {
            out.active.push_back(code.active[i]);
            if (vals) out.values.push_back(code.values[i]);
        }
    }
    return out;
}

std::vector<double> SparseCode::dense() const {
    std::vector<double> v(dim, 0.0);
    const bool vals = has_values();
    for (std::size_t i = 0; i < active.size(); ++i) {
        v[active[i]] = vals ? values[i] : 1.0;
    }
    return v;
}

SparsityStats measure_sparsity(const ProjectionMatrix& W,
                               const ThresholdVector& tau, const Matrix& inputs) {
    if (inputs.rows == 0) throw InputError("measure_sparsity: no inputs");
    const std::size_t d = W.output_dim;
    SparsityStats st;
    st.per_unit_rate.assign(d, 0.0);
    unsigned long long sum = 0, sumsq = 0;
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        SparseCode c = sparsify_binary(project(W, inputs.row(i)), tau);
        unsigned long long a = c.active.size();
        sum += a;
        sumsq += a * a;
        for (std::uint32_t j : c.active) st.per_unit_rate[j] += 1.0;
    }
    const double m = static_cast<double>(inputs.rows);
    st.mean_active = static_cast<double>(sum) / m;
    double var = static_cast<double>(sumsq) / m - st.mean_active * st.mean_active;
    st.std_active = var > 0.0 ? std::sqrt(var) : 0.0;
    for (double& r : st.per_unit_rate) r /= m;
    return st;
}

std::string code_to_csv_field(const SparseCode& code) {
    std::string out;
    for (std::size_t i = 0; i < code.active.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(code.active[i]);
        if (code.has_values()) {
            char buf[40];
            std::snprintf(buf, sizeof buf, ":%.17g", code.values[i]);
            out += buf;
        }
    }
    return out;
}

}  // namespace eas
