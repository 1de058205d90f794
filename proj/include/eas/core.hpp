#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace eas {

// Row-major dense matrix. Rows are samples (or projection units),
// columns are coordinates.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }

    bool empty() const { return rows == 0 || cols == 0; }
};

// Inner product accumulated in the widest native floating type, strictly
// left to right. Every dot product in the library goes through this one
// function so that batch and per-vector code paths are bit-identical.
inline double dot_lr(std::span<const double> a, std::span<const double> b) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
    }
    return static_cast<double>(acc);
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline bool all_finite(const Matrix& m) {
    return all_finite(std::span<const double>(m.data));
}

}  // namespace eas
