#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eas/core.hpp"
#include "eas/projection.hpp"

namespace eas {

enum class SparsifyMode { threshold_binary, threshold_relu, topk };
enum class TieRule { lowest_index };

struct SparsifyConfig {
    SparsifyMode mode = SparsifyMode::threshold_binary;
    std::size_t k = 1;
    TieRule tie_rule = TieRule::lowest_index;
    std::optional<double> dropout_rate;  // harness experiments only
};

// Throws ConfigError unless 1 <= k <= d and dropout_rate (if set) is in [0, 1).
void validate(const SparsifyConfig& cfg, std::size_t d);

// Per-unit activation thresholds estimated from a calibration set.
struct ThresholdVector {
    std::vector<double> taus;
    double quantile_level = 0.0;   // 1 - k/d
    std::size_t sample_size = 0;   // calibration size S
    std::uint64_t source_seed = 0; // provenance tag supplied by the caller

    std::size_t dim() const { return taus.size(); }
};

// Nearest-rank index (1-based) of the 100*(1-k/d)th percentile in a sample
// of size S, computed in exact integer arithmetic: r = floor(S*(d-k)/d) + 1.
std::size_t threshold_rank(std::size_t S, std::size_t k, std::size_t d);

// tau_j = r-th smallest calibration projection of unit j, so that each unit
// activates on ceil(S*k/d) of S calibration inputs: k-sparse in expectation.
ThresholdVector estimate_thresholds(const ProjectionMatrix& W,
                                    const Matrix& calibration, std::size_t k,
                                    std::uint64_t source_seed = 0);

// Sparse code over d units: sorted active indices, optionally with values.
// Binary codes carry no values; relu codes carry p_j - tau_j (> 0 at every
// active unit); value-keeping top-k codes carry the raw projections, which
// may be non-positive.
struct SparseCode {
    std::size_t dim = 0;
    std::vector<std::uint32_t> active;  // strictly increasing
    std::vector<double> values;         // empty, or one per active index

    bool has_values() const { return !values.empty(); }
    std::vector<double> dense() const;  // 0/1 indicator, test convenience
};

// z_j = 1 iff p_j >= tau_j; the boundary p_j == tau_j is active.
SparseCode sparsify_binary(std::span<const double> p, const ThresholdVector& tau);

// Active where p_j - tau_j > 0, carrying that value: same active set as the
// binary code except exactly at the boundary.
SparseCode sparsify_relu(std::span<const double> p, const ThresholdVector& tau);

// The k largest entries; ties broken in favor of the lowest index.
SparseCode sparsify_topk(std::span<const double> p, std::size_t k,
                         TieRule tie = TieRule::lowest_index,
                         bool keep_values = false);

// Zero each active index independently with probability rate.
SparseCode apply_dropout(const SparseCode& code, double rate, std::uint64_t seed);

struct SparsityStats {
    double mean_active = 0.0;
    double std_active = 0.0;              // population std
    std::vector<double> per_unit_rate;    // sums to mean_active
};

SparsityStats measure_sparsity(const ProjectionMatrix& W,
                               const ThresholdVector& tau, const Matrix& inputs);

// Active indices as a semicolon-joined field for CSV debugging exports.
std::string code_to_csv_field(const SparseCode& code);

}  // namespace eas
