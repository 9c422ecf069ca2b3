#include "fdsim/lora.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdsim/model.hpp"
#include "fdsim/rng.hpp"

namespace fdsim {

LoraAdapter lora_init(std::uint32_t rank, std::size_t d_in, std::size_t d_out,
                      double alpha, std::uint64_t seed) {
    if (rank < 1 || rank > std::min(d_in, d_out)) {
        throw InputError("lora_init: rank " + std::to_string(rank) +
                         " outside [1, min(d_in, d_out) = " +
                         std::to_string(std::min(d_in, d_out)) + "]");
    }
    LoraAdapter adapter;
    adapter.rank = rank;
    adapter.alpha = alpha;
    Rng rng(seed);
    adapter.a = gaussian_tensor(rank, d_in, 1.0 / std::sqrt(static_cast<double>(rank)), rng);
    adapter.b = Tensor2D(d_out, rank, 0.0);
    return adapter;
}

Tensor2D merge_weights(const Tensor2D& frozen, const LoraAdapter& adapter) {
    if (frozen.rows != adapter.d_out() || frozen.cols != adapter.d_in()) {
        throw ShapeError("merge_weights: frozen is " + std::to_string(frozen.rows) + "x" +
                         std::to_string(frozen.cols) + ", adapter maps " +
                         std::to_string(adapter.d_in()) + " -> " +
                         std::to_string(adapter.d_out()));
    }
    Tensor2D merged = frozen;
    const double s = adapter.scale();
    // merged += s * B * A
    for (std::size_t i = 0; i < adapter.b.rows; ++i) {
        const double* brow = adapter.b.row(i);
        double* mrow = merged.row(i);
        for (std::size_t r = 0; r < adapter.rank; ++r) {
            const double coef = s * brow[r];
            if (coef == 0.0) {
                continue;
            }
            const double* arow = adapter.a.row(r);
            for (std::size_t j = 0; j < adapter.a.cols; ++j) {
                mrow[j] += coef * arow[j];
            }
        }
    }
    return merged;
}

std::vector<double> lora_projection(const LoraAdapter& adapter, std::span<const double> x,
                                    bool apply_alpha_scale) {
    if (x.size() != adapter.d_in()) {
        throw ShapeError("lora_projection: input length " + std::to_string(x.size()) +
                         " != d_in " + std::to_string(adapter.d_in()));
    }
    std::vector<double> h(adapter.rank, 0.0);
    for (std::uint32_t r = 0; r < adapter.rank; ++r) {
        const double* arow = adapter.a.row(r);
        double acc = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            acc += arow[j] * x[j];
        }
        h[r] = apply_alpha_scale ? adapter.scale() * acc : acc;
    }
    return h;
}

namespace {

ProjectionBundle project_layer(const ModelState& model, const ForwardCache& cache,
                               std::size_t adapter_pos, bool apply_alpha_scale) {
    const AdaptedLayer& adapted = model.adapters[adapter_pos];
    const Tensor2D& x = cache.layer_inputs[adapted.layer_index];
    ProjectionBundle bundle;
    bundle.rank = adapted.adapter.rank;
    bundle.values = Tensor2D(x.rows, adapted.adapter.rank);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const auto h = lora_projection(adapted.adapter, std::span<const double>(x.row(i), x.cols),
                                       apply_alpha_scale);
        std::copy(h.begin(), h.end(), bundle.values.row(i));
    }
    return bundle;
}

}  // namespace

ProjectionBundle extract_projections(const ModelState& model, const Tensor2D& public_features,
                                     bool apply_alpha_scale) {
    if (public_features.rows == 0) {
        throw InputError("extract_projections: empty public set");
    }
    const auto fwd = model_forward(model, public_features);
    std::size_t pos = 0;
    while (model.adapters[pos].layer_index != model.projection_layer()) {
        ++pos;
    }
    return project_layer(model, fwd.cache, pos, apply_alpha_scale);
}

std::vector<ProjectionBundle> extract_all_projections(const ModelState& model,
                                                      const Tensor2D& public_features,
                                                      bool apply_alpha_scale) {
    if (public_features.rows == 0) {
        throw InputError("extract_all_projections: empty public set");
    }
    const auto fwd = model_forward(model, public_features);
    std::vector<ProjectionBundle> bundles;
    bundles.reserve(model.adapters.size());
    for (std::size_t pos = 0; pos < model.adapters.size(); ++pos) {
        bundles.push_back(project_layer(model, fwd.cache, pos, apply_alpha_scale));
    }
    return bundles;
}

}  // namespace fdsim
