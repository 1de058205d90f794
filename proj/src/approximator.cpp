#include "eas/approximator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "eas/error.hpp"

namespace eas {

namespace {

void check_training(const ProjectionMatrix& W, const ThresholdVector& tau,
                    const Matrix& inputs, std::size_t target_count) {
    if (tau.dim() != W.output_dim) {
        throw ShapeError("fit: threshold vector has length " +
                         std::to_string(tau.dim()) + ", expected " +
                         std::to_string(W.output_dim));
    }
    if (inputs.rows == 0) throw InputError("fit: empty training set");
    if (inputs.cols != W.input_dim) {
        throw ShapeError("fit: inputs have " + std::to_string(inputs.cols) +
                         " columns, expected " + std::to_string(W.input_dim));
    }
    if (inputs.rows != target_count) {
        throw ShapeError("fit: " + std::to_string(inputs.rows) + " inputs vs " +
                         std::to_string(target_count) + " targets");
    }
}

}  // namespace

Approximator fit_readout(ProjectionMatrix W, ThresholdVector tau,
                         const Matrix& inputs, std::span<const double> targets) {
    check_training(W, tau, inputs, targets.size());
    std::vector<SparseCode> codes;
    codes.reserve(inputs.rows);
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        codes.push_back(sparsify_binary(project(W, inputs.row(i)), tau));
    }
    return fit_readout_from_codes(std::move(W), std::move(tau), codes, targets);
}

Approximator fit_readout_from_codes(ProjectionMatrix W, ThresholdVector tau,
                                    const std::vector<SparseCode>& codes,
                                    std::span<const double> targets) {
    if (tau.dim() != W.output_dim) {
        throw ShapeError("fit: threshold vector length mismatch");
    }
    if (codes.size() != targets.size()) {
        throw ShapeError("fit: " + std::to_string(codes.size()) + " codes vs " +
                         std::to_string(targets.size()) + " targets");
    }
    if (codes.empty()) throw InputError("fit: empty training set");
    if (!all_finite(targets)) throw InputError("fit: targets contain non-finite values");
    const std::size_t d = W.output_dim;

    Approximator m;
    m.W = std::move(W);
    m.tau = std::move(tau);
    m.readout.assign(d, 0.0);
    m.counts.assign(d, 0);
    m.dead_mask.assign(d, 1);

    // Each unit's weight is the mean target over the fit points activating it.
    std::vector<long double> sums(d, 0.0L);
    long double total = 0.0L;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i].dim != d) {
            throw ShapeError("fit: code dimension mismatch at row " + std::to_string(i));
        }
        total += targets[i];
        for (std::uint32_t j : codes[i].active) {
            sums[j] += targets[i];
            m.counts[j] += 1;
        }
    }
    m.global_mean = static_cast<double>(total / static_cast<long double>(codes.size()));
    for (std::size_t j = 0; j < d; ++j) {
        if (m.counts[j] > 0) {
            m.readout[j] =
                static_cast<double>(sums[j] / static_cast<long double>(m.counts[j]));
            m.dead_mask[j] = 0;
        }
    }
    return m;
}

double predict_from_code(const Approximator& m, const SparseCode& code) {
    if (code.dim != m.hidden_dim()) {
        throw ShapeError("predict: code dimension mismatch");
    }
    long double sum = 0.0L;
    std::size_t denom = 0;
    for (std::uint32_t j : code.active) {
        if (m.dead_mask[j]) {
            if (m.dead_in_denominator) ++denom;  // weight 0, still averaged over
            continue;
        }
        sum += m.readout[j];
        ++denom;
    }
    if (denom == 0) {
        throw NoActiveUnits{};
    }
    return static_cast<double>(sum / static_cast<long double>(denom));
}

double predict(const Approximator& m, std::span<const double> u) {
    return predict_from_code(m, sparsify_binary(project(m.W, u), m.tau));
}

EvalStats evaluate(const Approximator& m, const Matrix& inputs,
                   std::span<const double> targets, Fallback fallback) {
    if (inputs.rows != targets.size()) {
        throw ShapeError("evaluate: input/target count mismatch");
    }
    if (inputs.rows == 0) throw InputError("evaluate: empty evaluation set");
    EvalStats st;
    long double abs_sum = 0.0L, sq_sum = 0.0L;
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        double yhat;
        try {
            yhat = predict(m, inputs.row(i));
        } catch (const NoActiveUnits&) {
            if (fallback == Fallback::error) throw;
            ++st.no_active_count;
            yhat = m.global_mean;
        }
        double e = std::fabs(yhat - targets[i]);
        abs_sum += e;
        sq_sum += static_cast<long double>(e) * e;
        if (e > st.max_abs_err) st.max_abs_err = e;
    }
    const auto cnt = static_cast<long double>(inputs.rows);
    st.mean_abs_err = static_cast<double>(abs_sum / cnt);
    st.rmse = std::sqrt(static_cast<double>(sq_sum / cnt));
    return st;
}

PruneResult prune_dead(const Approximator& m, const Matrix& reference_inputs) {
    if (reference_inputs.rows == 0) {
        throw InputError("prune_dead: empty reference set");
    }
    if (reference_inputs.cols != m.input_dim()) {
        throw ShapeError("prune_dead: reference inputs have wrong width");
    }
    const std::size_t d = m.hidden_dim();
    std::vector<std::uint8_t> used(d, 0);
    for (std::size_t i = 0; i < reference_inputs.rows; ++i) {
        SparseCode code =
            sparsify_binary(project(m.W, reference_inputs.row(i)), m.tau);
        for (std::uint32_t j : code.active) used[j] = 1;
    }
    std::vector<std::uint32_t> keep;
    keep.reserve(d);
    for (std::uint32_t j = 0; j < d; ++j) {
        if (used[j]) keep.push_back(j);
    }
    if (keep.empty()) {
        throw CalibrationError("prune_dead: no unit is activated by any reference input");
    }

    PruneResult res;
    res.removed_count = d - keep.size();

    Approximator& out = res.model;
    out.tau.quantile_level = m.tau.quantile_level;
    out.tau.sample_size = m.tau.sample_size;
    out.tau.source_seed = m.tau.source_seed;
    out.global_mean = m.global_mean;
    out.dead_in_denominator = m.dead_in_denominator;

    const std::size_t d2 = keep.size();
    Matrix rows(d2, m.input_dim());
    out.tau.taus.resize(d2);
    out.readout.resize(d2);
    out.counts.resize(d2);
    out.dead_mask.resize(d2);
    for (std::size_t r = 0; r < d2; ++r) {
        std::uint32_t j = keep[r];
        auto src = m.W.row(j);
        std::copy(src.begin(), src.end(), rows.row(r).begin());
        out.tau.taus[r] = m.tau.taus[j];
        out.readout[r] = m.readout[j];
        out.counts[r] = m.counts[j];
        out.dead_mask[r] = m.dead_mask[j];
    }
    out.W = projection_from_rows(std::move(rows), m.W.dist, m.W.sigma, m.W.seed);
    return res;
}

Classifier fit_classifier(ProjectionMatrix W, ThresholdVector tau,
                          const Matrix& inputs, std::span<const int> labels,
                          std::size_t num_classes) {
    check_training(W, tau, inputs, labels.size());
    if (num_classes == 0) {
        throw ConfigError("fit_classifier: num_classes must be positive");
    }
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
            throw InputError("fit_classifier: label " + std::to_string(y) +
                             " out of range for " + std::to_string(num_classes) +
                             " classes");
        }
    }
    const std::size_t d = W.output_dim;
    Classifier m;
    m.W = std::move(W);
    m.tau = std::move(tau);
    m.num_classes = num_classes;
    m.readout = Matrix(num_classes, d);
    m.counts.assign(d, 0);
    m.dead_mask.assign(d, 1);
    m.class_priors.assign(num_classes, 0.0);

    for (std::size_t i = 0; i < inputs.rows; ++i) {
        SparseCode code = sparsify_binary(project(m.W, inputs.row(i)), m.tau);
        auto y = static_cast<std::size_t>(labels[i]);
        m.class_priors[y] += 1.0;
        for (std::uint32_t j : code.active) {
            m.readout.at(y, j) += 1.0;
            m.counts[j] += 1;
        }
    }
    // Each unit's column becomes its per-class occupancy fractions, so a
    // prediction averages one-hot region means exactly like the regressor.
    for (std::size_t j = 0; j < d; ++j) {
        if (m.counts[j] == 0) continue;
        m.dead_mask[j] = 0;
        for (std::size_t c = 0; c < num_classes; ++c) {
            m.readout.at(c, j) /= static_cast<double>(m.counts[j]);
        }
    }
    for (double& p : m.class_priors) p /= static_cast<double>(inputs.rows);
    return m;
}

int predict_class(const Classifier& c, std::span<const double> u) {
    SparseCode code = sparsify_binary(project(c.W, u), c.tau);
    std::vector<long double> score(c.num_classes, 0.0L);
    std::size_t live = 0;
    for (std::uint32_t j : code.active) {
        if (c.dead_mask[j]) continue;
        ++live;
        for (std::size_t cls = 0; cls < c.num_classes; ++cls) {
            score[cls] += c.readout.at(cls, j);
        }
    }
    if (live == 0) {
        // Majority-class fallback keeps evaluation total.
        std::size_t best = 0;
        for (std::size_t cls = 1; cls < c.num_classes; ++cls) {
            if (c.class_priors[cls] > c.class_priors[best]) best = cls;
        }
        return static_cast<int>(best);
    }
    std::size_t best = 0;
    for (std::size_t cls = 1; cls < c.num_classes; ++cls) {
        if (score[cls] > score[best]) best = cls;
    }
    return static_cast<int>(best);
}

double classification_accuracy(const Classifier& c, const Matrix& inputs,
                               std::span<const int> labels) {
    if (inputs.rows != labels.size()) {
        throw ShapeError("classification_accuracy: input/label count mismatch");
    }
    if (inputs.rows == 0) throw InputError("classification_accuracy: empty set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        if (predict_class(c, inputs.row(i)) == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(inputs.rows);
}

}  // namespace eas
