#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eas/approximator.hpp"
#include "eas/data.hpp"
#include "eas/metrics.hpp"
#include "eas/projection.hpp"

namespace eas {

// Ordinary-least-squares line fit; degenerate when the fit is impossible
// (fewer than 3 points, zero x-variance, or undefined logs upstream).
struct SlopeFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    bool degenerate = false;
    std::size_t points = 0;
};

SlopeFit ols_slope(std::span<const double> x, std::span<const double> y);

// Spearman rank correlation (average ranks on ties).
double rank_correlation(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Experiment configs. Every experiment derives per-trial seeds as
// derive_seed(seed, cell_index, trial_index), buffers per-cell results, and
// writes rows in a fixed cell order, so output files are byte-identical
// across reruns and thread counts. The resolved config is echoed into the
// CSV as '# key: value' comment lines.
// ---------------------------------------------------------------------------

// Held-out error of the fitted approximator as d grows at fixed k: one OLS
// slope of log(mean_abs_err) against log(k/d) per (m, k) pair.
struct ScalingConfig {
    std::uint64_t seed = 1;
    std::size_t trials = 10;
    std::size_t n = 20;
    std::vector<std::size_t> intrinsic_dims = {1, 2};
    std::vector<std::size_t> ks = {32};
    std::vector<std::size_t> ds = {512, 1024, 2048, 4096, 8192};
    RowDist dist = RowDist::gaussian;
    std::size_t fit_samples = 4000;
    std::size_t test_samples = 1000;
    std::size_t frequency_count = 2;
    std::size_t max_frequency = 2;
    double amplitude = 1.0;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct ScalingCell {
    std::size_t m = 0, k = 0, d = 0, trial = 0;
    EvalStats stats;
};

struct ScalingSlopeRow {
    std::size_t m = 0, k = 0;
    SlopeFit fit;
};

struct ScalingResult {
    std::string csv;
    std::vector<ScalingCell> cells;
    std::vector<ScalingSlopeRow> slopes;
};

ScalingResult run_scaling(const ScalingConfig& cfg);

// Dead-unit removal: training error before/after (identical by construction)
// and degradation on a probe set drawn at larger radius.
struct PruningConfig {
    std::uint64_t seed = 1;
    std::size_t trials = 3;
    std::size_t n = 20;
    std::size_t m = 1;
    std::size_t d = 4096;
    std::size_t k = 1;
    std::size_t train_samples = 100;
    std::size_t calib_samples = 2000;  // thresholds calibrated off-train
    std::size_t probe_samples = 500;
    double probe_scale = 1.5;  // probe inputs = manifold points scaled up
    RowDist dist = RowDist::unit_sphere;
    std::size_t frequency_count = 2;
    std::size_t max_frequency = 2;
    double amplitude = 1.0;
    std::size_t threads = 0;
};

struct PruningCell {
    std::size_t trial = 0;
    std::size_t removed_count = 0;
    double train_err_before = 0.0, train_err_after = 0.0;
    double probe_err_before = 0.0, probe_err_after = 0.0;
};

struct PruningResult {
    std::string csv;
    std::vector<PruningCell> cells;
};

PruningResult run_pruning(const PruningConfig& cfg);

// Dropout arm (rate p at fit and eval) vs matched-sparsity arm
// (k' = round(k(1-p)), no dropout) on held-out error, plus the rank
// correlation between the two error ladders across p.
struct DropoutConfig {
    std::uint64_t seed = 1;
    std::size_t trials = 3;
    std::size_t n = 20;
    std::size_t m = 1;
    std::size_t d = 2048;
    std::size_t k = 64;
    std::vector<double> rates = {0.0, 0.25, 0.5, 0.75};
    std::size_t fit_samples = 2000;
    std::size_t test_samples = 500;
    RowDist dist = RowDist::unit_sphere;
    std::size_t frequency_count = 2;
    std::size_t max_frequency = 2;
    double amplitude = 1.0;
    std::size_t threads = 0;
};

struct DropoutCell {
    std::size_t trial = 0;
    double rate = 0.0;
    std::size_t k_effective = 0;
    double err_dropout = 0.0;
    double err_matched = 0.0;
};

struct DropoutResult {
    std::string csv;
    std::vector<DropoutCell> cells;
    double rank_correlation = 0.0;  // between per-rate mean error ladders
};

DropoutResult run_dropout(const DropoutConfig& cfg);

// True-label vs scrambled-label classification on clustered manifold
// classes: train/test accuracy per arm per trial.
struct MemorizationConfig {
    std::uint64_t seed = 1;
    std::size_t trials = 8;
    std::size_t n = 20;
    std::size_t classes = 4;
    std::size_t d = 4096;
    std::size_t k = 32;
    std::size_t train_samples = 500;
    std::size_t test_samples = 500;
    double separation = 3.5;  // distance of class centers from the origin
    std::size_t frequency_count = 4;
    std::size_t max_frequency = 512;
    bool normalize_radius = true;  // project class curves onto radius sqrt(n)
    RowDist dist = RowDist::unit_sphere;
    std::size_t threads = 0;
};

struct MemorizationCell {
    std::size_t trial = 0;
    bool scrambled = false;
    double train_acc = 0.0;
    double test_acc = 0.0;
    std::size_t dead_units = 0;
};

struct MemorizationResult {
    std::string csv;
    std::vector<MemorizationCell> cells;
    double true_train_acc = 0.0, true_test_acc = 0.0;       // means over trials
    double scrambled_train_acc = 0.0, scrambled_test_acc = 0.0;
    double scrambled_test_se = 0.0;  // SE of the scrambled test mean
};

MemorizationResult run_memorization(const MemorizationConfig& cfg);

// Clustered classification task shared by run_memorization and the CLI
// dataset generator: one random-trig curve per class (embedding seeds derived
// from embedding_seed, latents from sample_seed), each point optionally
// normalized to radius sqrt(n) before adding a class center of norm
// `separation`. Rows are class-major; labels 0..classes-1.
Dataset make_clustered_classes(std::size_t classes, std::size_t n,
                               std::size_t per_class, double separation,
                               std::size_t frequency_count,
                               std::size_t max_frequency, bool normalize_radius,
                               std::uint64_t embedding_seed,
                               std::uint64_t sample_seed);

// Code-overlap similarity profile over a radius ladder, plus the
// independent-draws overlap baseline as an extra CSV row.
struct LshProfileConfig {
    std::uint64_t seed = 1;
    std::size_t n = 20;
    std::size_t d = 2000;
    std::size_t k = 64;
    std::size_t calib_samples = 10000;
    std::size_t base_count = 1;  // base inputs cycled across pairs
    std::vector<double> radii = {0.0, 0.01, 0.1, 1.0, 10.0};
    std::size_t pairs_per_radius = 1000;
    RowDist dist = RowDist::unit_sphere;
};

struct LshProfileResult {
    std::string csv;
    OverlapProfile profile;
    double baseline_mean = 0.0;  // overlap of codes of independent draws
    double baseline_std = 0.0;
    std::size_t baseline_pairs = 0;
};

LshProfileResult run_lsh_profile(const LshProfileConfig& cfg);

// ---------------------------------------------------------------------------
// JSON front door used by the CLI: parse a config document (strict keys),
// apply key=value overrides, run, and return the CSV. Throws ConfigError on
// unknown tags, unknown keys or malformed values.
// ---------------------------------------------------------------------------

struct ExperimentOutput {
    std::string tag;
    std::string csv;
};

ExperimentOutput run_experiment_json(
    const std::string& tag, const std::string& config_json,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

}  // namespace eas
