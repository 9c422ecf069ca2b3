#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fdsim/logits.hpp"
#include "fdsim/lora.hpp"
#include "fdsim/tensor.hpp"

namespace fdsim {

enum class Activation : std::uint8_t { Relu = 0, Tanh = 1 };

struct LayerDims {
    std::size_t d_in = 0;
    std::size_t d_out = 0;

    bool operator==(const LayerDims&) const = default;
};

/// Architecture of a feed-forward classifier: a chain of linear layers with
/// the activation between them, the last layer emitting num_classes logits.
struct ModelSpec {
    std::vector<LayerDims> layer_dims;
    Activation activation = Activation::Relu;
    std::size_t num_classes = 0;
    std::vector<std::size_t> adapted_layers;  // ascending, unique

    void validate() const;
    bool is_adapted(std::size_t layer) const;

    bool operator==(const ModelSpec&) const = default;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double weight_decay = 1e-3;
    std::size_t batch_size = 32;
    std::size_t local_epochs = 1;

    void validate() const;

    bool operator==(const TrainConfig&) const = default;
};

struct FrozenLayer {
    Tensor2D weight;           // d_out x d_in
    std::vector<double> bias;  // d_out

    bool operator==(const FrozenLayer&) const = default;
};

struct AdaptedLayer {
    std::size_t layer_index = 0;
    LoraAdapter adapter;

    bool operator==(const AdaptedLayer&) const = default;
};

/// Frozen backbone plus trainable adapters. The backbone never changes
/// after construction; sgd_step touches adapter factors only and bumps
/// `version` so stale forward caches can be rejected.
struct ModelState {
    ModelSpec spec;
    std::vector<FrozenLayer> frozen;     // one per layer
    std::vector<AdaptedLayer> adapters;  // ascending layer_index
    std::uint64_t version = 0;

    const LoraAdapter* adapter_at(std::size_t layer) const;
    LoraAdapter* adapter_at(std::size_t layer);
    /// The layer whose h feeds distillation: the last adapted layer.
    std::size_t projection_layer() const;
    std::size_t input_dim() const { return spec.layer_dims.front().d_in; }
    std::size_t num_layers() const { return spec.layer_dims.size(); }
};

/// Backbone weights ~ N(0, 1/sqrt(d_in)) per layer from backbone_seed
/// (parties sharing spec and seed share the backbone bit for bit), zero
/// biases, adapters from lora_init with per-layer seeds off adapter_seed.
ModelState make_model(const ModelSpec& spec, std::uint32_t lora_rank, double lora_alpha,
                      std::uint64_t backbone_seed, std::uint64_t adapter_seed);

struct ForwardCache {
    std::uint64_t model_version = 0;
    const ModelState* model = nullptr;
    std::size_t batch_rows = 0;
    std::vector<Tensor2D> layer_inputs;  // x_i per layer
    std::vector<Tensor2D> preacts;       // z_i per layer
    std::vector<Tensor2D> lora_h;        // H_i per adapted layer (batch x r)
};

struct ForwardResult {
    DenseLogits logits;
    ForwardCache cache;
    /// One bundle per adapted layer (unscaled h = x A^T rows), ascending
    /// layer order; aligned with ModelState::adapters.
    std::vector<ProjectionBundle> projections;
};

/// Forward pass through merged weights W' + (alpha/r) B A, computed via the
/// factored path x W'^T + s (x A^T) B^T so the h projections fall out.
ForwardResult model_forward(const ModelState& model, const Tensor2D& batch);

struct AdapterGrad {
    std::size_t layer_index = 0;
    Tensor2D d_a;  // rank x d_in
    Tensor2D d_b;  // d_out x rank
};
using AdapterGrads = std::vector<AdapterGrad>;

/// Backpropagates d_logits (and optional per-adapted-layer gradients with
/// respect to the unscaled H rows) to the adapter factors. Frozen weights
/// receive no gradient. The cache must come from a forward pass on this
/// model at its current version, else ContractError.
AdapterGrads model_backward(const ModelState& model, const ForwardCache& cache,
                            const Tensor2D& d_logits,
                            const std::vector<Tensor2D>* d_projections = nullptr);

struct CrossEntropyResult {
    double loss = 0.0;
    Tensor2D d_logits;  // (softmax - onehot) / batch
};

/// Mean softmax cross-entropy. Labels must lie in [0, num_classes).
CrossEntropyResult cross_entropy_loss(const DenseLogits& logits, std::span<const int> labels);

/// params <- params - lr * (grad + weight_decay * params), adapters only.
void sgd_step(ModelState& model, const AdapterGrads& grads, const TrainConfig& cfg);

/// Argmax accuracy; ties resolve to the lowest class index.
double accuracy_eval(const ModelState& model, const Tensor2D& features,
                     std::span<const int> labels);

}  // namespace fdsim
