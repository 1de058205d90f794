#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eas/core.hpp"
#include "eas/projection.hpp"
#include "eas/sparsifier.hpp"

namespace eas {

// Single-hidden-layer approximator: binary sparse code of the projected
// input, readout = per-unit region means, prediction = ratio of sums.
struct Approximator {
    ProjectionMatrix W;
    ThresholdVector tau;
    std::vector<double> readout;        // d region means (0 for dead units)
    std::vector<std::uint64_t> counts;  // fit samples that activated each unit
    std::vector<std::uint8_t> dead_mask;  // 1 = never activated during fit
    double global_mean = 0.0;           // fit-set target mean (fallback value)
    // When true (default), a dead unit that activates at prediction time
    // still counts in the denominator (its weight is 0). Switching this off
    // is the pruning-susceptibility probe variant.
    bool dead_in_denominator = true;

    std::size_t input_dim() const { return W.input_dim; }
    std::size_t hidden_dim() const { return W.output_dim; }
};

// Region means over the fit set: readout_j = mean of targets whose code
// activates unit j; units activated by nothing get weight 0 and a dead mark.
Approximator fit_readout(ProjectionMatrix W, ThresholdVector tau,
                         const Matrix& inputs, std::span<const double> targets);

// Same, but from precomputed codes (harness dropout arms, oracle tests).
Approximator fit_readout_from_codes(ProjectionMatrix W, ThresholdVector tau,
                                    const std::vector<SparseCode>& codes,
                                    std::span<const double> targets);

// Weighted-average prediction; throws NoActiveUnits when the denominator
// is empty.
double predict(const Approximator& m, std::span<const double> u);
double predict_from_code(const Approximator& m, const SparseCode& code);

enum class Fallback { error, global_mean };

struct EvalStats {
    double mean_abs_err = 0.0;
    double max_abs_err = 0.0;
    double rmse = 0.0;
    std::size_t no_active_count = 0;
};

EvalStats evaluate(const Approximator& m, const Matrix& inputs,
                   std::span<const double> targets, Fallback fallback);

struct PruneResult {
    Approximator model;
    std::size_t removed_count = 0;
};

// Drop units never activated by any reference input (rows of W, taus,
// readout, counts and dead marks removed consistently, order preserved).
// Predictions on the reference inputs are bit-identical before and after.
PruneResult prune_dead(const Approximator& m, const Matrix& reference_inputs);

// One-hot multi-readout classifier sharing a single code per input.
struct Classifier {
    ProjectionMatrix W;
    ThresholdVector tau;
    std::size_t num_classes = 0;
    Matrix readout;                     // num_classes x d
    std::vector<std::uint64_t> counts;
    std::vector<std::uint8_t> dead_mask;
    std::vector<double> class_priors;   // fit-set label frequencies
    bool dead_in_denominator = true;
};

Classifier fit_classifier(ProjectionMatrix W, ThresholdVector tau,
                          const Matrix& inputs, std::span<const int> labels,
                          std::size_t num_classes);

// Argmax over per-class weighted averages (shared denominator); an input
// with no active units falls back to the majority fit-set class.
int predict_class(const Classifier& c, std::span<const double> u);

double classification_accuracy(const Classifier& c, const Matrix& inputs,
                               std::span<const int> labels);

}  // namespace eas
