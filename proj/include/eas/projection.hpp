#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eas/core.hpp"

namespace eas {

enum class RowDist { gaussian, unit_sphere };

// Row distribution request. For gaussian rows, sigma defaults to 1/sqrt(n)
// when unset so projected coordinates of unit-variance inputs keep unit
// variance.
struct DistSpec {
    RowDist kind = RowDist::unit_sphere;
    std::optional<double> sigma;  // gaussian only

    static DistSpec gaussian(std::optional<double> sigma = std::nullopt) {
        return {RowDist::gaussian, sigma};
    }
    static DistSpec unit_sphere() { return {RowDist::unit_sphere, std::nullopt}; }
};

// A sampled wide random projection: d rows of length n, d > n. Rows are a
// pure function of (n, d, dist, seed); row j is regenerated from
// derive_seed(seed, j) alone.
struct ProjectionMatrix {
    std::size_t input_dim = 0;   // n
    std::size_t output_dim = 0;  // d
    RowDist dist = RowDist::unit_sphere;
    double sigma = 0.0;          // resolved value; 0 for unit_sphere
    std::uint64_t seed = 0;
    Matrix rows;                 // d x n, row-major

    std::span<const double> row(std::size_t j) const { return rows.row(j); }
};

ProjectionMatrix sample_projection(std::size_t n, std::size_t d, DistSpec dist,
                                   std::uint64_t seed);

// Wrap explicit rows (model loading, pruning, hand-built test fixtures).
ProjectionMatrix projection_from_rows(Matrix rows, RowDist dist, double sigma,
                                      std::uint64_t seed);

// p = W u, each coordinate a left-to-right long-double dot product.
std::vector<double> project(const ProjectionMatrix& W, std::span<const double> u);

// One row of output per input row; row i is bit-identical to project() on
// that input.
Matrix project_batch(const ProjectionMatrix& W, const Matrix& inputs);

struct CoherenceStats {
    double max_abs_cosine = 0.0;
    double mean_abs_cosine = 0.0;
    std::size_t pair_count = 0;
    bool exhaustive = false;  // true when every pair was measured
};

// |cosine| statistics over row pairs: exhaustive when d(d-1)/2 <= sample_pairs,
// otherwise over sample_pairs seeded random pairs.
CoherenceStats pairwise_coherence(const ProjectionMatrix& W,
                                  std::size_t sample_pairs, std::uint64_t seed);

}  // namespace eas
