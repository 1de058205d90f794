#include "eas/projection.hpp"

#include <cmath>
#include <string>

#include "eas/error.hpp"
#include "eas/rng.hpp"

namespace eas {

namespace {

// Fill one row; the stream is derived from (seed, j) only, so rows can be
// regenerated independently.
void fill_row(std::span<double> row, RowDist dist, double sigma,
              std::uint64_t seed, std::size_t j) {
    Rng rng(derive_seed(seed, j));
    for (double& x : row) x = rng.normal();
    if (dist == RowDist::gaussian) {
        for (double& x : row) x *= sigma;
        return;
    }
    // unit_sphere: normalized gaussian direction
    for (;;) {
        long double sq = 0.0L;
        for (double x : row) sq += static_cast<long double>(x) * x;
        double norm = std::sqrt(static_cast<double>(sq));
        if (norm > 0.0) {
            for (double& x : row) x /= norm;
            return;
        }
        for (double& x : row) x = rng.normal();
    }
}

}  // namespace

ProjectionMatrix sample_projection(std::size_t n, std::size_t d, DistSpec dist,
                                   std::uint64_t seed) {
    if (n == 0 || d == 0) {
        throw ConfigError("projection dimensions must be positive");
    }
    if (d <= n) {
        throw ConfigError("projection must expand: d > n required, got d=" +
                          std::to_string(d) + " n=" + std::to_string(n));
    }
    double sigma = 0.0;
    if (dist.kind == RowDist::gaussian) {
        sigma = dist.sigma.value_or(1.0 / std::sqrt(static_cast<double>(n)));
        if (!(sigma > 0.0)) {
            throw ConfigError("gaussian sigma must be positive");
        }
    }
    ProjectionMatrix W;
    W.input_dim = n;
    W.output_dim = d;
    W.dist = dist.kind;
    W.sigma = sigma;
    W.seed = seed;
    W.rows = Matrix(d, n);
    for (std::size_t j = 0; j < d; ++j) {
        fill_row(W.rows.row(j), dist.kind, sigma, seed, j);
    }
    return W;
}

ProjectionMatrix projection_from_rows(Matrix rows, RowDist dist, double sigma,
                                      std::uint64_t seed) {
    if (rows.rows == 0 || rows.cols == 0) {
        throw ConfigError("projection rows must be non-empty");
    }
    ProjectionMatrix W;
    W.input_dim = rows.cols;
    W.output_dim = rows.rows;
    W.dist = dist;
    W.sigma = sigma;
    W.seed = seed;
    W.rows = std::move(rows);
    return W;
}

std::vector<double> project(const ProjectionMatrix& W, std::span<const double> u) {
    if (u.size() != W.input_dim) {
        throw ShapeError("project: input has length " + std::to_string(u.size()) +
                         ", expected " + std::to_string(W.input_dim));
    }
    if (!all_finite(u)) {
        throw InputError("project: input contains non-finite values");
    }
    std::vector<double> p(W.output_dim);
    for (std::size_t j = 0; j < W.output_dim; ++j) {
        p[j] = dot_lr(W.row(j), u);
    }
    return p;
}

Matrix project_batch(const ProjectionMatrix& W, const Matrix& inputs) {
    if (inputs.cols != W.input_dim) {
        throw ShapeError("project_batch: inputs have " +
                         std::to_string(inputs.cols) + " columns, expected " +
                         std::to_string(W.input_dim));
    }
    if (!all_finite(inputs)) {
        throw InputError("project_batch: inputs contain non-finite values");
    }
    Matrix out(inputs.rows, W.output_dim);
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        auto u = inputs.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < W.output_dim; ++j) {
            dst[j] = dot_lr(W.row(j), u);
        }
    }
    return out;
}

CoherenceStats pairwise_coherence(const ProjectionMatrix& W,
                                  std::size_t sample_pairs, std::uint64_t seed) {
    const std::size_t d = W.output_dim;
    if (d < 2) {
        throw ConfigError("pairwise_coherence needs at least two rows");
    }
    if (sample_pairs == 0) {
        throw ConfigError("pairwise_coherence needs sample_pairs > 0");
    }
    std::vector<double> norms(d);
    for (std::size_t j = 0; j < d; ++j) {
        norms[j] = std::sqrt(dot_lr(W.row(j), W.row(j)));
    }
    auto abs_cos = [&](std::size_t i, std::size_t j) {
        double denom = norms[i] * norms[j];
        if (denom == 0.0) return 0.0;
        return std::fabs(dot_lr(W.row(i), W.row(j))) / denom;
    };

    CoherenceStats stats;
    long double sum = 0.0L;
    const std::size_t total = d * (d - 1) / 2;
    if (total <= sample_pairs) {
        stats.exhaustive = true;
        stats.pair_count = total;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                double c = abs_cos(i, j);
                sum += c;
                if (c > stats.max_abs_cosine) stats.max_abs_cosine = c;
            }
        }
    } else {
        stats.exhaustive = false;
        stats.pair_count = sample_pairs;
        Rng rng(derive_seed(seed, 0x70616972));
        for (std::size_t s = 0; s < sample_pairs; ++s) {
            std::size_t i = static_cast<std::size_t>(rng.below(d));
            std::size_t j = static_cast<std::size_t>(rng.below(d));
            while (j == i) j = static_cast<std::size_t>(rng.below(d));
            double c = abs_cos(i, j);
            sum += c;
            if (c > stats.max_abs_cosine) stats.max_abs_cosine = c;
        }
    }
    stats.mean_abs_cosine =
        static_cast<double>(sum / static_cast<long double>(stats.pair_count));
    return stats;
}

}  // namespace eas
