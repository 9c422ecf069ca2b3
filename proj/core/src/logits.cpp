#include "fdsim/logits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fdsim {

void SparsePayload::validate() const {
    if (samples.size() != num_samples) {
        throw ShapeError("SparsePayload: sample list length != num_samples");
    }
    if (k > dim_c) {
        throw InputError("SparsePayload: k exceeds dim_c");
    }
    for (const auto& entries : samples) {
        if (entries.size() > k) {
            throw InputError("SparsePayload: sample carries more than k entries");
        }
        std::uint32_t prev = 0;
        bool first = true;
        for (const auto& e : entries) {
            if (e.index >= dim_c) {
                throw InputError("SparsePayload: entry index out of range");
            }
            if (!first && e.index <= prev) {
                throw InputError("SparsePayload: entry indices not strictly increasing");
            }
            if (!std::isfinite(e.value)) {
                throw InputError("SparsePayload: non-finite entry value");
            }
            prev = e.index;
            first = false;
        }
    }
}

std::vector<SparseEntry> top_k_select(std::span<const double> vec, std::uint32_t k) {
    if (k < 1 || k > vec.size()) {
        throw InputError("top_k_select: k must satisfy 1 <= k <= " +
                         std::to_string(vec.size()) + ", got " + std::to_string(k));
    }
    std::vector<std::uint32_t> order(vec.size());
    std::iota(order.begin(), order.end(), 0u);
    // Largest value first; equal values keep the lower index.
    const auto by_value = [&vec](std::uint32_t lhs, std::uint32_t rhs) {
        if (vec[lhs] != vec[rhs]) {
            return vec[lhs] > vec[rhs];
        }
        return lhs < rhs;
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), by_value);
    order.resize(k);
    std::sort(order.begin(), order.end());

    std::vector<SparseEntry> out;
    out.reserve(k);
    for (std::uint32_t idx : order) {
        out.push_back(SparseEntry{idx, vec[idx]});
    }
    return out;
}

SparsePayload sparsify(const DenseLogits& logits, std::uint32_t k,
                       std::uint32_t client_id, std::uint32_t round) {
    SparsePayload payload;
    payload.client_id = client_id;
    payload.round = round;
    payload.num_samples = static_cast<std::uint32_t>(logits.num_samples());
    payload.dim_c = static_cast<std::uint32_t>(logits.dim_c());
    payload.k = k;
    payload.samples.reserve(logits.num_samples());
    for (std::size_t i = 0; i < logits.num_samples(); ++i) {
        std::span<const double> row(logits.values.row(i), logits.dim_c());
        payload.samples.push_back(top_k_select(row, k));
    }
    return payload;
}

DensifiedView densify(const SparsePayload& payload, double fill) {
    payload.validate();
    DensifiedView view;
    view.values = Tensor2D(payload.num_samples, payload.dim_c, fill);
    view.present.assign(std::size_t{payload.num_samples} * payload.dim_c, 0);
    for (std::size_t i = 0; i < payload.samples.size(); ++i) {
        for (const auto& e : payload.samples[i]) {
            view.values.at(i, e.index) = e.value;
            view.present[i * payload.dim_c + e.index] = 1;
        }
    }
    return view;
}

}  // namespace fdsim
