#include "fdsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdsim/rng.hpp"

namespace fdsim {

namespace {

double activate(double z, Activation act) {
    switch (act) {
        case Activation::Relu:
            return z > 0.0 ? z : 0.0;
        case Activation::Tanh:
            return std::tanh(z);
    }
    return z;
}

double activate_grad(double z, Activation act) {
    switch (act) {
        case Activation::Relu:
            return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
    }
    return 1.0;
}

}  // namespace

void ModelSpec::validate() const {
    if (layer_dims.empty()) {
        throw InputError("ModelSpec: no layers");
    }
    for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i) {
        if (layer_dims[i].d_out != layer_dims[i + 1].d_in) {
            throw InputError("ModelSpec: layer " + std::to_string(i) + " d_out (" +
                             std::to_string(layer_dims[i].d_out) + ") != layer " +
                             std::to_string(i + 1) + " d_in");
        }
    }
    if (layer_dims.back().d_out != num_classes) {
        throw InputError("ModelSpec: last layer d_out != num_classes");
    }
    for (std::size_t i = 0; i < layer_dims.size(); ++i) {
        if (layer_dims[i].d_in == 0 || layer_dims[i].d_out == 0) {
            throw InputError("ModelSpec: zero-sized layer " + std::to_string(i));
        }
    }
    std::size_t prev = 0;
    bool first = true;
    for (std::size_t idx : adapted_layers) {
        if (idx >= layer_dims.size()) {
            throw InputError("ModelSpec: adapted layer index " + std::to_string(idx) +
                             " out of range");
        }
        if (!first && idx <= prev) {
            throw InputError("ModelSpec: adapted_layers must be ascending and unique");
        }
        prev = idx;
        first = false;
    }
}

bool ModelSpec::is_adapted(std::size_t layer) const {
    return std::find(adapted_layers.begin(), adapted_layers.end(), layer) != adapted_layers.end();
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) {
        throw InputError("TrainConfig: learning_rate must be > 0");
    }
    if (weight_decay < 0.0) {
        throw InputError("TrainConfig: weight_decay must be >= 0");
    }
    if (batch_size < 1) {
        throw InputError("TrainConfig: batch_size must be >= 1");
    }
}

const LoraAdapter* ModelState::adapter_at(std::size_t layer) const {
    for (const auto& a : adapters) {
        if (a.layer_index == layer) {
            return &a.adapter;
        }
    }
    return nullptr;
}

LoraAdapter* ModelState::adapter_at(std::size_t layer) {
    for (auto& a : adapters) {
        if (a.layer_index == layer) {
            return &a.adapter;
        }
    }
    return nullptr;
}

std::size_t ModelState::projection_layer() const {
    if (adapters.empty()) {
        throw InputError("ModelState: no adapted layers");
    }
    return adapters.back().layer_index;
}

ModelState make_model(const ModelSpec& spec, std::uint32_t lora_rank, double lora_alpha,
                      std::uint64_t backbone_seed, std::uint64_t adapter_seed) {
    spec.validate();
    ModelState model;
    model.spec = spec;
    Rng backbone_rng(backbone_seed);
    for (const auto& dims : spec.layer_dims) {
        FrozenLayer layer;
        layer.weight = gaussian_tensor(dims.d_out, dims.d_in,
                                       1.0 / std::sqrt(static_cast<double>(dims.d_in)),
                                       backbone_rng);
        layer.bias.assign(dims.d_out, 0.0);
        model.frozen.push_back(std::move(layer));
    }
    for (std::size_t idx : spec.adapted_layers) {
        const auto& dims = spec.layer_dims[idx];
        AdaptedLayer adapted;
        adapted.layer_index = idx;
        adapted.adapter = lora_init(lora_rank, dims.d_in, dims.d_out, lora_alpha,
                                    derive_seed(adapter_seed, "lora_layer", idx));
        model.adapters.push_back(std::move(adapted));
    }
    return model;
}

ForwardResult model_forward(const ModelState& model, const Tensor2D& batch) {
    if (batch.cols != model.input_dim()) {
        throw ShapeError("model_forward: batch has " + std::to_string(batch.cols) +
                         " features, model expects " + std::to_string(model.input_dim()));
    }
    ForwardResult result;
    ForwardCache& cache = result.cache;
    cache.model = &model;
    cache.model_version = model.version;
    cache.batch_rows = batch.rows;

    Tensor2D x = batch;
    std::size_t adapter_pos = 0;
    for (std::size_t i = 0; i < model.num_layers(); ++i) {
        cache.layer_inputs.push_back(x);
        const FrozenLayer& layer = model.frozen[i];
        Tensor2D z = matmul_bt(x, layer.weight);
        const LoraAdapter* adapter = model.adapter_at(i);
        if (adapter != nullptr) {
            Tensor2D h = matmul_bt(x, adapter->a);  // batch x r
            const double s = adapter->scale();
            // z += s * h * B^T
            Tensor2D delta = matmul_bt(h, adapter->b);
            for (std::size_t n = 0; n < z.data.size(); ++n) {
                z.data[n] += s * delta.data[n];
            }
            ProjectionBundle bundle;
            bundle.rank = adapter->rank;
            bundle.values = h;
            result.projections.push_back(std::move(bundle));
            cache.lora_h.push_back(std::move(h));
            ++adapter_pos;
        }
        for (std::size_t r = 0; r < z.rows; ++r) {
            double* zr = z.row(r);
            for (std::size_t c = 0; c < z.cols; ++c) {
                zr[c] += layer.bias[c];
            }
        }
        cache.preacts.push_back(z);
        if (i + 1 < model.num_layers()) {
            for (double& v : z.data) {
                v = activate(v, model.spec.activation);
            }
        }
        x = std::move(z);
    }
    result.logits = DenseLogits(std::move(x));
    return result;
}

AdapterGrads model_backward(const ModelState& model, const ForwardCache& cache,
                            const Tensor2D& d_logits,
                            const std::vector<Tensor2D>* d_projections) {
    if (cache.model != &model || cache.model_version != model.version) {
        throw ContractError("model_backward: cache does not match this model state");
    }
    if (d_logits.rows != cache.batch_rows || d_logits.cols != model.spec.num_classes) {
        throw ShapeError("model_backward: d_logits shape mismatch");
    }
    if (d_projections != nullptr && d_projections->size() != model.adapters.size()) {
        throw ShapeError("model_backward: d_projections entry per adapted layer expected");
    }

    AdapterGrads grads(model.adapters.size());
    for (std::size_t p = 0; p < model.adapters.size(); ++p) {
        grads[p].layer_index = model.adapters[p].layer_index;
    }

    Tensor2D d_out = d_logits;  // gradient w.r.t. current layer output
    for (std::size_t i = model.num_layers(); i-- > 0;) {
        Tensor2D d_z = std::move(d_out);
        if (i + 1 < model.num_layers()) {
            const Tensor2D& z = cache.preacts[i];
            for (std::size_t n = 0; n < d_z.data.size(); ++n) {
                d_z.data[n] *= activate_grad(z.data[n], model.spec.activation);
            }
        }
        const Tensor2D& x = cache.layer_inputs[i];
        const LoraAdapter* adapter = model.adapter_at(i);
        Tensor2D d_x = matmul(d_z, model.frozen[i].weight);  // d_z * W'
        if (adapter != nullptr) {
            std::size_t pos = 0;
            while (model.adapters[pos].layer_index != i) {
                ++pos;
            }
            const double s = adapter->scale();
            const Tensor2D& h = cache.lora_h[pos];
            // dB = s * d_z^T * H
            Tensor2D d_b = matmul_at(d_z, h);
            for (double& v : d_b.data) {
                v *= s;
            }
            // dH = s * d_z * B (logit path) plus any injected projection gradient.
            Tensor2D d_h = matmul(d_z, adapter->b);
            for (double& v : d_h.data) {
                v *= s;
            }
            if (d_projections != nullptr && !(*d_projections)[pos].empty()) {
                const Tensor2D& inj = (*d_projections)[pos];
                if (inj.rows != d_h.rows || inj.cols != d_h.cols) {
                    throw ShapeError("model_backward: injected projection gradient shape mismatch");
                }
                for (std::size_t n = 0; n < d_h.data.size(); ++n) {
                    d_h.data[n] += inj.data[n];
                }
            }
            grads[pos].d_a = matmul_at(d_h, x);  // dA = dH^T * x
            grads[pos].d_b = std::move(d_b);
            matmul_add(d_h, adapter->a, d_x);  // d_x += dH * A
        }
        d_out = std::move(d_x);
    }
    return grads;
}

CrossEntropyResult cross_entropy_loss(const DenseLogits& logits, std::span<const int> labels) {
    if (labels.size() != logits.num_samples()) {
        throw ShapeError("cross_entropy_loss: label count != sample count");
    }
    if (logits.num_samples() == 0) {
        throw InputError("cross_entropy_loss: empty batch");
    }
    const std::size_t n = logits.num_samples();
    const std::size_t c = logits.dim_c();
    CrossEntropyResult result;
    result.d_logits = Tensor2D(n, c);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= c) {
            throw InputError("cross_entropy_loss: label " + std::to_string(label) +
                             " out of range [0, " + std::to_string(c) + ")");
        }
        const double* row = logits.values.row(i);
        double mx = row[0];
        for (std::size_t j = 1; j < c; ++j) {
            mx = std::max(mx, row[j]);
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            denom += std::exp(row[j] - mx);
        }
        total += std::log(denom) - (row[label] - mx);
        double* grad = result.d_logits.row(i);
        for (std::size_t j = 0; j < c; ++j) {
            grad[j] = std::exp(row[j] - mx) / denom / static_cast<double>(n);
        }
        grad[label] -= 1.0 / static_cast<double>(n);
    }
    result.loss = total / static_cast<double>(n);
    return result;
}

void sgd_step(ModelState& model, const AdapterGrads& grads, const TrainConfig& cfg) {
    cfg.validate();
    if (grads.size() != model.adapters.size()) {
        throw ShapeError("sgd_step: gradient count != adapter count");
    }
    for (std::size_t p = 0; p < grads.size(); ++p) {
        LoraAdapter& adapter = model.adapters[p].adapter;
        const AdapterGrad& g = grads[p];
        if (g.layer_index != model.adapters[p].layer_index ||
            g.d_a.rows != adapter.a.rows || g.d_a.cols != adapter.a.cols ||
            g.d_b.rows != adapter.b.rows || g.d_b.cols != adapter.b.cols) {
            throw ShapeError("sgd_step: gradient shape mismatch at adapter " + std::to_string(p));
        }
        for (std::size_t n = 0; n < adapter.a.data.size(); ++n) {
            adapter.a.data[n] -= cfg.learning_rate *
                                 (g.d_a.data[n] + cfg.weight_decay * adapter.a.data[n]);
        }
        for (std::size_t n = 0; n < adapter.b.data.size(); ++n) {
            adapter.b.data[n] -= cfg.learning_rate *
                                 (g.d_b.data[n] + cfg.weight_decay * adapter.b.data[n]);
        }
    }
    ++model.version;
}

double accuracy_eval(const ModelState& model, const Tensor2D& features,
                     std::span<const int> labels) {
    if (features.rows == 0) {
        throw InputError("accuracy_eval: empty dataset");
    }
    if (labels.size() != features.rows) {
        throw ShapeError("accuracy_eval: label count != sample count");
    }
    const auto fwd = model_forward(model, features);
    std::size_t hits = 0;
    const std::size_t c = fwd.logits.dim_c();
    for (std::size_t i = 0; i < features.rows; ++i) {
        const double* row = fwd.logits.values.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < c; ++j) {
            if (row[j] > row[best]) {
                best = j;
            }
        }
        if (static_cast<int>(best) == labels[i]) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(features.rows);
}

}  // namespace fdsim
