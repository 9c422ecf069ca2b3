#pragma once

#include <cstdint>
#include <vector>

#include "fdsim/logits.hpp"
#include "fdsim/lora.hpp"
#include "fdsim/tensor.hpp"

namespace fdsim {

/// Per-(sample, dimension) contributor counts.
struct CoverageGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint32_t> counts;

    CoverageGrid() = default;
    CoverageGrid(std::size_t r, std::size_t c, std::uint32_t fill = 0)
        : rows(r), cols(c), counts(r * c, fill) {}

    std::uint32_t& at(std::size_t r, std::size_t c) { return counts[r * cols + c]; }
    std::uint32_t at(std::size_t r, std::size_t c) const { return counts[r * cols + c]; }

    bool operator==(const CoverageGrid&) const = default;
};

/// Server-side combined logits K_g. coverage(x, c) counts the clients whose
/// payload actually contained dimension c for sample x, so a dimension
/// nobody sent stays distinguishable from an aggregated zero.
struct AggregatedLogits {
    Tensor2D values;  // num_samples x dim_c
    CoverageGrid coverage;

    std::size_t num_samples() const { return values.rows; }
    std::size_t dim_c() const { return values.cols; }

    /// Wraps already-dense logits (e.g. a decoded teacher broadcast) with
    /// uniform coverage `n`.
    static AggregatedLogits full_coverage(DenseLogits logits, std::uint32_t n = 1);

    bool operator==(const AggregatedLogits&) const = default;
};

/// The magnitude scores behind the adaptive weights: s(x, c) = |K~(x, c)|
/// per contributing client, and their per-dimension totals S.
struct DimensionScores {
    Tensor2D total;                   // S per (sample, dim)
    std::vector<Tensor2D> per_client; // s per payload, zero where absent
};

DimensionScores compute_dimension_scores(const std::vector<SparsePayload>& payloads);

/// Dimension-wise magnitude-weighted combination: for each (x, c) covered by
/// at least one payload, K_g = sum_n w_n K~_n with w_n = |K~_n| / S. If every
/// contributor sent exactly 0 the unweighted mean of contributors is used;
/// uncovered dimensions take 0 with coverage 0. Payloads are consumed in
/// ascending client_id order so results are schedule-independent.
AggregatedLogits adaptive_aggregate(const std::vector<SparsePayload>& payloads);

/// Baseline: absent dimensions count as 0 and every payload enters the
/// plain mean, regardless of coverage.
AggregatedLogits zero_pad_aggregate(const std::vector<SparsePayload>& payloads);

/// Baseline for dense uplinks: arithmetic mean, full coverage.
AggregatedLogits dense_mean_aggregate(const std::vector<DenseLogits>& logits);

/// Uniform per-sample mean of projection bundles. All bundles must share
/// rank and sample count.
ProjectionBundle aggregate_projections(const std::vector<ProjectionBundle>& bundles);

}  // namespace fdsim
