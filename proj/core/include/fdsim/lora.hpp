#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fdsim/tensor.hpp"

namespace fdsim {

struct ModelState;

/// Low-rank adapter pair for one linear layer. The merged layer weight is
/// W' + (alpha / rank) * B * A; at init B = 0 so merging is the identity.
struct LoraAdapter {
    Tensor2D a;  // rank x d_in
    Tensor2D b;  // d_out x rank
    std::uint32_t rank = 0;
    double alpha = 1.0;

    double scale() const { return alpha / static_cast<double>(rank); }
    std::size_t d_in() const { return a.cols; }
    std::size_t d_out() const { return b.rows; }

    bool operator==(const LoraAdapter&) const = default;
};

/// Per-sample low-rank projections h = A x taken at one adapted layer.
/// Double precision in memory; the wire carries them as f32.
struct ProjectionBundle {
    std::uint32_t rank = 0;
    Tensor2D values;  // num_samples x rank

    std::size_t num_samples() const { return values.rows; }
    bool operator==(const ProjectionBundle&) const = default;
};

/// A ~ N(0, 1/rank) entries from `seed`, B = 0. Requires 1 <= rank <= min(d_in, d_out).
LoraAdapter lora_init(std::uint32_t rank, std::size_t d_in, std::size_t d_out,
                      double alpha, std::uint64_t seed);

/// W' + (alpha/rank) * B * A. Inputs are untouched.
Tensor2D merge_weights(const Tensor2D& frozen, const LoraAdapter& adapter);

/// h = A x, length rank. `apply_alpha_scale` multiplies by alpha/rank
/// (off by default; the bare projection is the distillation signal).
std::vector<double> lora_projection(const LoraAdapter& adapter, std::span<const double> x,
                                    bool apply_alpha_scale = false);

/// Projections of every sample at the model's projection layer (the last
/// adapted layer), evaluated at that layer's input activation.
ProjectionBundle extract_projections(const ModelState& model, const Tensor2D& public_features,
                                     bool apply_alpha_scale = false);

/// One bundle per adapted layer, ascending layer order.
std::vector<ProjectionBundle> extract_all_projections(const ModelState& model,
                                                      const Tensor2D& public_features,
                                                      bool apply_alpha_scale = false);

}  // namespace fdsim
