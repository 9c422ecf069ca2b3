#include "fdsim/checkpoint.hpp"

#include <fstream>

#include "fdsim/detail/bytes.hpp"

namespace fdsim {

namespace {

constexpr char kMagic[4] = {'F', 'D', 'S', 'M'};
constexpr std::uint16_t kVersion = 1;

void write_tensor(detail::ByteWriter& w, const Tensor2D& t) {
    for (double v : t.data) {
        w.f64(v);
    }
}

Tensor2D read_tensor(detail::ByteReader& r, std::size_t rows, std::size_t cols) {
    Tensor2D t(rows, cols);
    for (double& v : t.data) {
        v = r.f64();
    }
    return t;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const ModelState& model) {
    detail::ByteWriter w;
    w.bytes(kMagic, 4);
    w.u16(kVersion);
    w.u32(static_cast<std::uint32_t>(model.spec.layer_dims.size()));
    for (const auto& dims : model.spec.layer_dims) {
        w.u32(static_cast<std::uint32_t>(dims.d_in));
        w.u32(static_cast<std::uint32_t>(dims.d_out));
    }
    w.u8(static_cast<std::uint8_t>(model.spec.activation));
    w.u32(static_cast<std::uint32_t>(model.spec.num_classes));
    w.u32(static_cast<std::uint32_t>(model.adapters.size()));
    for (const auto& adapted : model.adapters) {
        w.u32(static_cast<std::uint32_t>(adapted.layer_index));
        w.u32(adapted.adapter.rank);
        w.f64(adapted.adapter.alpha);
    }
    for (const auto& layer : model.frozen) {
        write_tensor(w, layer.weight);
        for (double v : layer.bias) {
            w.f64(v);
        }
    }
    for (const auto& adapted : model.adapters) {
        write_tensor(w, adapted.adapter.a);
        write_tensor(w, adapted.adapter.b);
    }
    return w.take();
}

ModelState deserialize_model(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    char magic[4];
    for (char& c : magic) {
        c = static_cast<char>(r.u8());
    }
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw DecodeError(DecodeError::Code::BadMagic, "not a model checkpoint");
    }
    if (r.u16() != kVersion) {
        throw DecodeError(DecodeError::Code::BadVersion, "unsupported checkpoint version");
    }
    ModelState model;
    const std::uint32_t num_layers = r.u32();
    model.spec.layer_dims.reserve(num_layers);
    for (std::uint32_t i = 0; i < num_layers; ++i) {
        LayerDims dims;
        dims.d_in = r.u32();
        dims.d_out = r.u32();
        model.spec.layer_dims.push_back(dims);
    }
    model.spec.activation = static_cast<Activation>(r.u8());
    model.spec.num_classes = r.u32();
    const std::uint32_t num_adapted = r.u32();
    struct AdapterHeader {
        std::uint32_t layer_index;
        std::uint32_t rank;
        double alpha;
    };
    std::vector<AdapterHeader> headers;
    headers.reserve(num_adapted);
    for (std::uint32_t i = 0; i < num_adapted; ++i) {
        AdapterHeader h;
        h.layer_index = r.u32();
        h.rank = r.u32();
        h.alpha = r.f64();
        if (h.layer_index >= num_layers) {
            throw DecodeError(DecodeError::Code::BadLayout, "adapted layer index out of range");
        }
        headers.push_back(h);
        model.spec.adapted_layers.push_back(h.layer_index);
    }
    model.spec.validate();
    for (const auto& dims : model.spec.layer_dims) {
        FrozenLayer layer;
        layer.weight = read_tensor(r, dims.d_out, dims.d_in);
        layer.bias.resize(dims.d_out);
        for (double& v : layer.bias) {
            v = r.f64();
        }
        model.frozen.push_back(std::move(layer));
    }
    for (const auto& h : headers) {
        const auto& dims = model.spec.layer_dims[h.layer_index];
        AdaptedLayer adapted;
        adapted.layer_index = h.layer_index;
        adapted.adapter.rank = h.rank;
        adapted.adapter.alpha = h.alpha;
        adapted.adapter.a = read_tensor(r, h.rank, dims.d_in);
        adapted.adapter.b = read_tensor(r, dims.d_out, h.rank);
        model.adapters.push_back(std::move(adapted));
    }
    if (!r.done()) {
        throw DecodeError(DecodeError::Code::BadLayout, "trailing bytes after checkpoint");
    }
    return model;
}

void save_model(const ModelState& model, const std::filesystem::path& path) {
    const auto bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("short write to " + path.string());
    }
}

ModelState load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

std::vector<std::uint8_t> serialize_frozen_weights(const ModelState& model) {
    detail::ByteWriter w;
    for (const auto& layer : model.frozen) {
        write_tensor(w, layer.weight);
        for (double v : layer.bias) {
            w.f64(v);
        }
    }
    return w.take();
}

}  // namespace fdsim
