#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eas/core.hpp"
#include "eas/projection.hpp"
#include "eas/sparsifier.hpp"

namespace eas {

// |active(a) ∩ active(b)|. Throws ShapeError on dimension mismatch.
std::size_t code_overlap(const SparseCode& a, const SparseCode& b);

// Symmetric-difference size of the two active sets.
std::size_t code_hamming(const SparseCode& a, const SparseCode& b);

struct OverlapBin {
    double distance_lo = 0.0;
    double distance_hi = 0.0;
    double mean_overlap = 0.0;
    double std_overlap = 0.0;  // population std over the bin's pairs
    std::size_t pair_count = 0;
};

struct OverlapProfile {
    std::vector<OverlapBin> bins;  // ordered by increasing distance
};

// Locality profile of the code map. For each radius eps, draws pairs
// (u, u + eps * random unit direction) with u cycling over base_inputs, and
// records code-overlap statistics per radius. Radii must be strictly
// increasing and non-negative.
OverlapProfile similarity_profile(const ProjectionMatrix& W,
                                  const ThresholdVector& tau,
                                  const Matrix& base_inputs,
                                  std::span<const double> radii,
                                  std::size_t pairs_per_radius,
                                  std::uint64_t seed);

// CSV export: header bin_lo,bin_hi,mean,std,count.
std::string profile_to_csv(const OverlapProfile& profile);

struct ProbeResult {
    std::vector<double> input;     // the probe's final point
    double input_distance = 0.0;   // Euclidean distance from the start
    std::size_t code_hamming = 0;  // vs the start's code
    std::size_t steps_taken = 0;
};

// Greedy coordinate search for code instability: at each step move one
// coordinate by +-step, picking the candidate that flips the most code bits
// per unit of distance from the original input. Ties are broken by a seeded
// draw. Zero flips after max_steps is a valid outcome.
ProbeResult adversarial_probe(const ProjectionMatrix& W,
                              const ThresholdVector& tau,
                              std::span<const double> u, double step,
                              std::size_t max_steps, std::uint64_t seed);

// Baseline for the probe: same number of +-step coordinate moves, with the
// coordinate and sign drawn uniformly at random.
ProbeResult random_walk_probe(const ProjectionMatrix& W,
                              const ThresholdVector& tau,
                              std::span<const double> u, double step,
                              std::size_t max_steps, std::uint64_t seed);

}  // namespace eas
