#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpband {

/// Absolute tolerance used by all approximate comparisons in the library.
struct Tolerance {
    double eps = 1e-10;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class OutOfRange : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotDoublyStochastic : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Small square dense matrix, row-major. Used for Gram reconstructions,
/// eigensolves and determinant oracles; never for bulk storage.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), vals_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return vals_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return vals_[i * n_ + j]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : vals_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> vals_;
};

} // namespace cpband
