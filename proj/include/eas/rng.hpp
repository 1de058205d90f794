#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace eas {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer: bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-style seed derivation: a base seed combined with an index through
// the splitmix mixer. Row j of a projection depends only on (seed, j), and
// experiment trials derive their seeds the same way, so any subset of work
// can be regenerated independently and in any order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ (index + 1) * kGolden);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b, std::uint64_t c) {
    return derive_seed(derive_seed(seed, a, b), c);
}

// splitmix64 stream. Small, fast, and fully defined by this header, so
// sampled values are reproducible bit-for-bit on any platform this builds on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform draw in (0, 1]; never 0, so log() below is safe.
    double uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Unbiased integer in [0, bound) via 128-bit multiply.
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Standard normal via Box-Muller; the second variate of each pair is
    // cached so consecutive calls consume one uniform pair per two normals.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Uniform random direction on the unit sphere in R^n.
inline std::vector<double> unit_direction(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (;;) {
        long double sq = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = rng.normal();
            sq += static_cast<long double>(v[i]) * v[i];
        }
        double norm = std::sqrt(static_cast<double>(sq));
        if (norm > 0.0) {
            for (double& x : v) x /= norm;
            return v;
        }
    }
}

}  // namespace eas
