#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eas/core.hpp"

namespace eas {

enum class EmbeddingKind { random_trig, circle };

// Smooth synthetic input manifold: latent points uniform on [0,1)^m mapped
// into R^n. random_trig embeds each ambient coordinate as a random integer-
// frequency trigonometric polynomial of the latents (smooth by construction);
// circle is the fixed curve (cos 2*pi*t, sin 2*pi*t, 0, ...), amplitude-scaled.
struct ManifoldSpec {
    std::size_t intrinsic_dim = 1;   // m
    std::size_t ambient_dim = 2;     // n
    std::uint64_t embedding_seed = 0;
    std::size_t frequency_count = 3;  // trig components per coordinate
    std::size_t max_frequency = 3;    // integer frequencies in [-max, max]
    double amplitude = 1.0;
    EmbeddingKind embedding = EmbeddingKind::random_trig;
};

void validate(const ManifoldSpec& spec);

struct ManifoldSample {
    Matrix points;   // count x n
    Matrix latents;  // count x m, kept so tests can see the chart
};

ManifoldSample sample_manifold(const ManifoldSpec& spec, std::size_t count,
                               std::uint64_t seed);

// Deterministic embedding of a single latent point (tests recompute points).
std::vector<double> embed_latent(const ManifoldSpec& spec,
                                 std::span<const double> t);

enum class TargetTag { lipschitz_trig, region_constant, linear };

// Scalar target with a recorded Lipschitz constant where one is known
// (NaN for piecewise-constant targets).
struct TargetFn {
    std::string tag;
    double lipschitz = 0.0;
    std::function<double(std::span<const double>)> f;

    double operator()(std::span<const double> u) const { return f(u); }
};

// Random instance of the named family on inputs of dimension n.
TargetFn make_target(TargetTag tag, std::size_t n, std::uint64_t seed);

// Explicit constructions used by tests and by make_target internally.
TargetFn make_linear_target(std::vector<double> weights);
TargetFn make_lipschitz_trig_target(std::size_t n, std::size_t components,
                                    std::uint64_t seed);
TargetFn make_region_constant_target(Matrix anchors, std::vector<double> values);

enum class TaskKind { regression, classification };

struct Dataset {
    TaskKind kind = TaskKind::regression;
    Matrix inputs;
    std::vector<double> targets;  // regression
    std::vector<int> labels;      // classification
    std::size_t num_classes = 0;
    std::string provenance;
    std::uint64_t seed = 0;
    Matrix latents;  // synthetic datasets only; empty otherwise

    std::size_t size() const { return inputs.rows; }
};

// Replace classification labels with i.i.d. uniform draws over the label
// alphabet; inputs are untouched.
Dataset scramble_labels(const Dataset& ds, std::uint64_t seed);

struct CsvColumnMap {
    std::vector<std::string> feature_columns;  // header names
    std::string target_column;
    TaskKind kind = TaskKind::regression;
    bool standardize = false;  // per-feature mean 0, variance 1
};

// Strict CSV reader: header row required, '.' decimal, UTF-8. Errors name
// the offending 1-based physical row and column.
Dataset load_csv(const std::string& path, const CsvColumnMap& map);

// Writer for `gen`: features f0..f{n-1} plus a target/label column.
void save_csv(const Dataset& ds, const std::string& path);

}  // namespace eas
