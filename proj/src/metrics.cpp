#include "eas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <tuple>

#include "eas/error.hpp"
#include "eas/rng.hpp"

namespace eas {

std::size_t code_overlap(const SparseCode& a, const SparseCode& b) {
    if (a.dim != b.dim) throw ShapeError("code_overlap: dimension mismatch");
    std::size_t i = 0, j = 0, n = 0;
    while (i < a.active.size() && j < b.active.size()) {
        if (a.active[i] == b.active[j]) {
            ++n;
            ++i;
            ++j;
        } else if (a.active[i] < b.active[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return n;
}

std::size_t code_hamming(const SparseCode& a, const SparseCode& b) {
    // |a| + |b| - 2*overlap: units active in exactly one of the two codes
    return a.active.size() + b.active.size() - 2 * code_overlap(a, b);
}

OverlapProfile similarity_profile(const ProjectionMatrix& W,
                                  const ThresholdVector& tau,
                                  const Matrix& base_inputs,
                                  std::span<const double> radii,
                                  std::size_t pairs_per_radius,
                                  std::uint64_t seed) {
    if (base_inputs.rows == 0) throw InputError("similarity_profile: no base inputs");
    if (base_inputs.cols != W.input_dim) {
        throw ShapeError("similarity_profile: base inputs have wrong width");
    }
    if (radii.empty()) throw ConfigError("similarity_profile: no radii");
    if (pairs_per_radius == 0) throw ConfigError("similarity_profile: pairs_per_radius must be positive");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] >= 0.0)) {
            throw ConfigError("similarity_profile: radii must be non-negative");
        }
        if (i > 0 && !(radii[i] > radii[i - 1])) {
            throw ConfigError("similarity_profile: radii must be strictly increasing");
        }
    }
    const std::size_t n = W.input_dim;

    std::vector<SparseCode> base_codes;
    base_codes.reserve(base_inputs.rows);
    for (std::size_t i = 0; i < base_inputs.rows; ++i) {
        base_codes.push_back(sparsify_binary(project(W, base_inputs.row(i)), tau));
    }

    OverlapProfile profile;
    std::vector<double> v(n);
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        const double eps = radii[ri];
        // Integer accumulation keeps the eps=0 bin's variance exactly zero.
        unsigned long long sum = 0, sumsq = 0;
        Rng rng(derive_seed(seed, 0x72616469, ri));
        for (std::size_t p = 0; p < pairs_per_radius; ++p) {
            std::size_t b = p % base_inputs.rows;  // cycle over base inputs
            auto u = base_inputs.row(b);
            if (eps == 0.0) {
                std::copy(u.begin(), u.end(), v.begin());
            } else {
                std::vector<double> dir = unit_direction(rng, n);
                for (std::size_t t = 0; t < n; ++t) v[t] = u[t] + eps * dir[t];
            }
            SparseCode c = sparsify_binary(project(W, v), tau);
            unsigned long long ov = code_overlap(base_codes[b], c);
            sum += ov;
            sumsq += ov * ov;
        }
        const double cnt = static_cast<double>(pairs_per_radius);
        OverlapBin bin;
        bin.distance_lo = eps;
        bin.distance_hi = eps;
        bin.pair_count = pairs_per_radius;
        bin.mean_overlap = static_cast<double>(sum) / cnt;
        double var = static_cast<double>(sumsq) / cnt - bin.mean_overlap * bin.mean_overlap;
        bin.std_overlap = var > 0.0 ? std::sqrt(var) : 0.0;
        profile.bins.push_back(bin);
    }
    return profile;
}

std::string profile_to_csv(const OverlapProfile& profile) {
    std::string out = "bin_lo,bin_hi,mean,std,count\n";
    char buf[200];
    for (const auto& b : profile.bins) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%zu\n",
                      b.distance_lo, b.distance_hi, b.mean_overlap, b.std_overlap,
                      b.pair_count);
        out += buf;
    }
    return out;
}

ProbeResult adversarial_probe(const ProjectionMatrix& W, const ThresholdVector& tau,
                              std::span<const double> u, double step,
                              std::size_t max_steps, std::uint64_t seed) {
    if (!(step > 0.0)) throw ConfigError("adversarial_probe: step must be positive");
    const std::size_t n = W.input_dim;
    SparseCode base = sparsify_binary(project(W, u), tau);

    ProbeResult res;
    res.input.assign(u.begin(), u.end());
    res.steps_taken = 0;
    res.input_distance = 0.0;
    res.code_hamming = 0;

    auto flips_per_dist = [&](const std::vector<double>& x) {
        long double sq = 0.0L;
        for (std::size_t t = 0; t < n; ++t) {
            double dlt = x[t] - u[t];
            sq += static_cast<long double>(dlt) * dlt;
        }
        double dist = std::sqrt(static_cast<double>(sq));
        SparseCode c = sparsify_binary(project(W, x), tau);
        std::size_t h = code_hamming(base, c);
        double score = dist > 0.0 ? static_cast<double>(h) / dist
                                  : (h > 0 ? std::numeric_limits<double>::infinity() : 0.0);
        return std::tuple<double, double, std::size_t>(score, dist, h);
    };

    Rng rng(derive_seed(seed, 0x70726f62));
    std::vector<double> cur(u.begin(), u.end());
    auto [cur_score, cur_dist, cur_h] = flips_per_dist(cur);
    for (std::size_t s = 0; s < max_steps; ++s) {
        double best_score = cur_score;
        std::vector<double> best;
        double best_dist = cur_dist;
        std::size_t best_h = cur_h;
        std::size_t candidates = 0;
        for (std::size_t t = 0; t < n; ++t) {
            for (double sgn : {+1.0, -1.0}) {
                std::vector<double> cand = cur;
                cand[t] += sgn * step;
                auto [sc, dist, h] = flips_per_dist(cand);
                if (sc > best_score) {
                    best_score = sc;
                    best = std::move(cand);
                    best_dist = dist;
                    best_h = h;
                    candidates = 1;
                } else if (sc == best_score && sc > cur_score) {
                    // Reservoir-sample equal-score moves so ties are broken by
                    // the seed, not by coordinate order.
                    ++candidates;
                    if (rng.below(candidates) == 0) {
                        best = std::move(cand);
                        best_dist = dist;
                        best_h = h;
                    }
                }
            }
        }
        if (best.empty()) break;  // local maximum
        cur = std::move(best);
        cur_score = best_score;
        cur_dist = best_dist;
        cur_h = best_h;
        res.steps_taken = s + 1;
    }
    res.input = cur;
    res.input_distance = cur_dist;
    res.code_hamming = cur_h;
    return res;
}

ProbeResult random_walk_probe(const ProjectionMatrix& W, const ThresholdVector& tau,
                              std::span<const double> u, double step,
                              std::size_t max_steps, std::uint64_t seed) {
    if (!(step > 0.0)) throw ConfigError("random_walk_probe: step must be positive");
    const std::size_t n = W.input_dim;
    SparseCode base = sparsify_binary(project(W, u), tau);
    Rng rng(derive_seed(seed, 0x77616c6b));

    std::vector<double> cur(u.begin(), u.end());
    for (std::size_t s = 0; s < max_steps; ++s) {
        std::size_t t = static_cast<std::size_t>(rng.below(n));
        cur[t] += (rng.below(2) == 0 ? 1.0 : -1.0) * step;
    }
    long double sq = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
        double dlt = cur[t] - u[t];
        sq += static_cast<long double>(dlt) * dlt;
    }
    ProbeResult res;
    res.input = std::move(cur);
    res.input_distance = std::sqrt(static_cast<double>(sq));
    res.code_hamming = code_hamming(base, sparsify_binary(project(W, res.input), tau));
    res.steps_taken = max_steps;
    return res;
}

}  // namespace eas
