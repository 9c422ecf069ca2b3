#pragma once

#include <cstddef>
#include <vector>

#include "fdsim/error.hpp"

namespace fdsim {

class Rng;

/// Dense row-major matrix of doubles. Rows index samples in batch data.
struct Tensor2D {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows * cols, row-major

    Tensor2D() = default;
    Tensor2D(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    bool empty() const { return data.empty(); }

    bool operator==(const Tensor2D&) const = default;
};

/// Entries drawn i.i.d. N(0, stddev^2).
Tensor2D gaussian_tensor(std::size_t rows, std::size_t cols, double stddev, Rng& rng);

/// out = a * b^T. a is (n x k), b is (m x k), out becomes (n x m).
/// The layer forward layout: x (batch x d_in) times W (d_out x d_in).
Tensor2D matmul_bt(const Tensor2D& a, const Tensor2D& b);

/// out = a * b. a is (n x k), b is (k x m).
Tensor2D matmul(const Tensor2D& a, const Tensor2D& b);

/// out += a * b, shapes as in matmul.
void matmul_add(const Tensor2D& a, const Tensor2D& b, Tensor2D& out);

/// out = a^T * b. a is (k x n), b is (k x m), out becomes (n x m).
Tensor2D matmul_at(const Tensor2D& a, const Tensor2D& b);

/// Checks every entry for NaN/inf.
bool all_finite(const Tensor2D& t);

}  // namespace fdsim
