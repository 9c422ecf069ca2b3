#include "fdsim/tensor.hpp"

#include <cmath>
#include <string>

#include "fdsim/rng.hpp"

namespace fdsim {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw ShapeError(what);
    }
}

}  // namespace

Tensor2D gaussian_tensor(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
    Tensor2D t(rows, cols);
    for (double& v : t.data) {
        v = rng.normal(0.0, stddev);
    }
    return t;
}

Tensor2D matmul_bt(const Tensor2D& a, const Tensor2D& b) {
    require(a.cols == b.cols, "matmul_bt: inner dimensions differ (" +
                                  std::to_string(a.cols) + " vs " + std::to_string(b.cols) + ")");
    Tensor2D out(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ar = a.row(i);
        double* or_ = out.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* br = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) {
                acc += ar[k] * br[k];
            }
            or_[j] = acc;
        }
    }
    return out;
}

Tensor2D matmul(const Tensor2D& a, const Tensor2D& b) {
    Tensor2D out(a.rows, b.cols);
    matmul_add(a, b, out);
    return out;
}

void matmul_add(const Tensor2D& a, const Tensor2D& b, Tensor2D& out) {
    require(a.cols == b.rows, "matmul: inner dimensions differ (" + std::to_string(a.cols) +
                                  " vs " + std::to_string(b.rows) + ")");
    require(out.rows == a.rows && out.cols == b.cols, "matmul: output shape mismatch");
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ar = a.row(i);
        double* or_ = out.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = ar[k];
            if (aik == 0.0) {
                continue;
            }
            const double* br = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) {
                or_[j] += aik * br[j];
            }
        }
    }
}

Tensor2D matmul_at(const Tensor2D& a, const Tensor2D& b) {
    require(a.rows == b.rows, "matmul_at: leading dimensions differ (" +
                                  std::to_string(a.rows) + " vs " + std::to_string(b.rows) + ")");
    Tensor2D out(a.cols, b.cols);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* ar = a.row(k);
        const double* br = b.row(k);
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = ar[i];
            if (aki == 0.0) {
                continue;
            }
            double* or_ = out.row(i);
            for (std::size_t j = 0; j < b.cols; ++j) {
                or_[j] += aki * br[j];
            }
        }
    }
    return out;
}

bool all_finite(const Tensor2D& t) {
    for (double v : t.data) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

}  // namespace fdsim
