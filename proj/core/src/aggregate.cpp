#include "fdsim/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fdsim {

namespace {

/// Payload indices in ascending client_id order (stable for duplicates).
std::vector<std::size_t> client_order(const std::vector<SparsePayload>& payloads) {
    std::vector<std::size_t> order(payloads.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&payloads](std::size_t a, std::size_t b) {
        return payloads[a].client_id < payloads[b].client_id;
    });
    return order;
}

void check_payloads(const std::vector<SparsePayload>& payloads) {
    if (payloads.empty()) {
        throw InputError("aggregate: payload list is empty");
    }
    for (const auto& p : payloads) {
        p.validate();
        if (p.num_samples != payloads.front().num_samples || p.dim_c != payloads.front().dim_c) {
            throw ShapeError("aggregate: payloads disagree on num_samples/dim_c");
        }
    }
}

}  // namespace

AggregatedLogits AggregatedLogits::full_coverage(DenseLogits logits, std::uint32_t n) {
    AggregatedLogits out;
    out.coverage = CoverageGrid(logits.num_samples(), logits.dim_c(), n);
    out.values = std::move(logits.values);
    return out;
}

DimensionScores compute_dimension_scores(const std::vector<SparsePayload>& payloads) {
    check_payloads(payloads);
    const std::size_t n = payloads.front().num_samples;
    const std::size_t c = payloads.front().dim_c;
    DimensionScores scores;
    scores.total = Tensor2D(n, c);
    scores.per_client.reserve(payloads.size());
    for (const auto& p : payloads) {
        Tensor2D s(n, c);
        for (std::size_t x = 0; x < p.samples.size(); ++x) {
            for (const auto& e : p.samples[x]) {
                s.at(x, e.index) = std::abs(e.value);
            }
        }
        scores.per_client.push_back(std::move(s));
    }
    for (const auto& s : scores.per_client) {
        for (std::size_t i = 0; i < s.data.size(); ++i) {
            scores.total.data[i] += s.data[i];
        }
    }
    return scores;
}

AggregatedLogits adaptive_aggregate(const std::vector<SparsePayload>& payloads) {
    check_payloads(payloads);
    const std::size_t n = payloads.front().num_samples;
    const std::size_t c = payloads.front().dim_c;

    // Accumulate sum(|v| * v), sum(|v|), sum(v) and the contributor count
    // per (sample, dim); the weighted form K_g = sum(|v| v) / sum(|v|)
    // equals Eq. 6 + Eq. 11 without materializing the weights.
    Tensor2D weighted(n, c);
    Tensor2D score_sum(n, c);
    Tensor2D plain_sum(n, c);
    AggregatedLogits out;
    out.values = Tensor2D(n, c);
    out.coverage = CoverageGrid(n, c);

    for (std::size_t idx : client_order(payloads)) {
        const auto& p = payloads[idx];
        for (std::size_t x = 0; x < p.samples.size(); ++x) {
            for (const auto& e : p.samples[x]) {
                const double s = std::abs(e.value);
                weighted.at(x, e.index) += s * e.value;
                score_sum.at(x, e.index) += s;
                plain_sum.at(x, e.index) += e.value;
                ++out.coverage.at(x, e.index);
            }
        }
    }

    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t d = 0; d < c; ++d) {
            const std::uint32_t cov = out.coverage.at(x, d);
            if (cov == 0) {
                out.values.at(x, d) = 0.0;
            } else if (score_sum.at(x, d) == 0.0) {
                // All contributors sent exactly 0: unweighted mean avoids 0/0.
                out.values.at(x, d) = plain_sum.at(x, d) / static_cast<double>(cov);
            } else {
                out.values.at(x, d) = weighted.at(x, d) / score_sum.at(x, d);
            }
        }
    }
    return out;
}

AggregatedLogits zero_pad_aggregate(const std::vector<SparsePayload>& payloads) {
    check_payloads(payloads);
    const std::size_t n = payloads.front().num_samples;
    const std::size_t c = payloads.front().dim_c;
    const double count = static_cast<double>(payloads.size());

    AggregatedLogits out;
    out.values = Tensor2D(n, c);
    out.coverage = CoverageGrid(n, c);
    for (std::size_t idx : client_order(payloads)) {
        const auto& p = payloads[idx];
        for (std::size_t x = 0; x < p.samples.size(); ++x) {
            for (const auto& e : p.samples[x]) {
                out.values.at(x, e.index) += e.value;
                ++out.coverage.at(x, e.index);
            }
        }
    }
    for (double& v : out.values.data) {
        v /= count;
    }
    return out;
}

AggregatedLogits dense_mean_aggregate(const std::vector<DenseLogits>& logits) {
    if (logits.empty()) {
        throw InputError("dense_mean_aggregate: empty input");
    }
    const std::size_t n = logits.front().num_samples();
    const std::size_t c = logits.front().dim_c();
    for (const auto& l : logits) {
        if (l.num_samples() != n || l.dim_c() != c) {
            throw ShapeError("dense_mean_aggregate: shape mismatch");
        }
    }
    AggregatedLogits out;
    out.values = Tensor2D(n, c);
    out.coverage = CoverageGrid(n, c, static_cast<std::uint32_t>(logits.size()));
    for (const auto& l : logits) {
        for (std::size_t i = 0; i < out.values.data.size(); ++i) {
            out.values.data[i] += l.values.data[i];
        }
    }
    const double count = static_cast<double>(logits.size());
    for (double& v : out.values.data) {
        v /= count;
    }
    return out;
}

ProjectionBundle aggregate_projections(const std::vector<ProjectionBundle>& bundles) {
    if (bundles.empty()) {
        throw InputError("aggregate_projections: empty input");
    }
    const std::uint32_t rank = bundles.front().rank;
    const std::size_t n = bundles.front().num_samples();
    for (const auto& b : bundles) {
        if (b.rank != rank) {
            throw InputError("aggregate_projections: rank mismatch (" + std::to_string(b.rank) +
                             " vs " + std::to_string(rank) + "); cross-rank clients unsupported");
        }
        if (b.num_samples() != n) {
            throw ShapeError("aggregate_projections: sample count mismatch");
        }
    }
    ProjectionBundle out;
    out.rank = rank;
    out.values = Tensor2D(n, rank);
    for (const auto& b : bundles) {
        for (std::size_t i = 0; i < out.values.data.size(); ++i) {
            out.values.data[i] += b.values.data[i];
        }
    }
    const double count = static_cast<double>(bundles.size());
    for (double& v : out.values.data) {
        v /= count;
    }
    return out;
}

}  // namespace fdsim
