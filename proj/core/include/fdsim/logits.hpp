#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fdsim/lora.hpp"
#include "fdsim/tensor.hpp"

namespace fdsim {

/// Full per-sample logit vectors over the public set.
struct DenseLogits {
    Tensor2D values;  // num_samples x dim_c

    DenseLogits() = default;
    explicit DenseLogits(Tensor2D v) : values(std::move(v)) {}

    std::size_t num_samples() const { return values.rows; }
    std::size_t dim_c() const { return values.cols; }

    bool operator==(const DenseLogits&) const = default;
};

struct SparseEntry {
    std::uint32_t index = 0;
    double value = 0.0;

    bool operator==(const SparseEntry&) const = default;
};

/// Top-k logits of one client for one round: per sample, exactly k
/// (index, value) pairs sorted by ascending index. The uplink unit.
struct SparsePayload {
    std::uint32_t client_id = 0;
    std::uint32_t round = 0;
    std::uint32_t num_samples = 0;
    std::uint32_t dim_c = 0;
    std::uint32_t k = 0;
    std::vector<std::vector<SparseEntry>> samples;

    /// Throws InputError/ShapeError if any invariant is broken.
    void validate() const;

    bool operator==(const SparsePayload&) const = default;
};

/// The broadcast knowledge: dense logits over the public set plus the
/// teacher's projection bundle (rank 0 when the strategy does not use it).
struct TeacherPayload {
    std::uint32_t round = 0;
    DenseLogits logits;
    ProjectionBundle projections;

    bool operator==(const TeacherPayload&) const = default;
};

/// A client's projection bundle travelling on its own (uplink side-channel,
/// outside the Top-k budget).
struct ProjectionPayload {
    std::uint32_t client_id = 0;
    std::uint32_t round = 0;
    ProjectionBundle bundle;

    bool operator==(const ProjectionPayload&) const = default;
};

/// The k largest-valued entries; ties broken toward the lower index.
/// Output sorted by ascending index. Requires 1 <= k <= vec.size().
std::vector<SparseEntry> top_k_select(std::span<const double> vec, std::uint32_t k);

/// Applies top_k_select per sample. k is clamped nowhere: 1 <= k <= dim_c.
SparsePayload sparsify(const DenseLogits& logits, std::uint32_t k,
                       std::uint32_t client_id, std::uint32_t round);

/// Dense view of a payload: absent dimensions take `fill`, presence is
/// tracked separately so a sent 0.0 stays distinguishable from "not sent".
struct DensifiedView {
    Tensor2D values;
    std::vector<std::uint8_t> present;  // num_samples * dim_c

    bool is_present(std::size_t sample, std::size_t dim) const {
        return present[sample * values.cols + dim] != 0;
    }
};

DensifiedView densify(const SparsePayload& payload, double fill = 0.0);

}  // namespace fdsim
