#include "fdsim/wire.hpp"

#include <cstring>

#include "fdsim/detail/bytes.hpp"

namespace fdsim {

namespace {

constexpr char kMagic[4] = {'A', 'D', 'L', 'D'};
constexpr std::uint16_t kVersion = 1;

struct Header {
    PayloadKind kind;
    std::uint32_t client_id;
    std::uint32_t round;
    std::uint32_t num_samples;
    std::uint32_t dim_c;
    std::uint32_t k;
    std::uint32_t rank;
};

void write_header(detail::ByteWriter& w, const Header& h) {
    w.bytes(kMagic, 4);
    w.u16(kVersion);
    w.u8(static_cast<std::uint8_t>(h.kind));
    w.u32(h.client_id);
    w.u32(h.round);
    w.u32(h.num_samples);
    w.u32(h.dim_c);
    w.u32(h.k);
    w.u32(h.rank);
}

Header read_header(detail::ByteReader& r) {
    char magic[4];
    for (char& c : magic) {
        c = static_cast<char>(r.u8());
    }
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw DecodeError(DecodeError::Code::BadMagic, "not an ADLD payload");
    }
    if (r.u16() != kVersion) {
        throw DecodeError(DecodeError::Code::BadVersion, "unsupported payload version");
    }
    Header h;
    const std::uint8_t kind = r.u8();
    if (kind < 1 || kind > 3) {
        throw DecodeError(DecodeError::Code::BadKind,
                          "unknown payload kind " + std::to_string(kind));
    }
    h.kind = static_cast<PayloadKind>(kind);
    h.client_id = r.u32();
    h.round = r.u32();
    h.num_samples = r.u32();
    h.dim_c = r.u32();
    h.k = r.u32();
    h.rank = r.u32();
    return h;
}

void write_f32_matrix(detail::ByteWriter& w, const Tensor2D& t) {
    for (double v : t.data) {
        w.f32(static_cast<float>(v));
    }
}

Tensor2D read_f32_matrix(detail::ByteReader& r, std::size_t rows, std::size_t cols) {
    Tensor2D t(rows, cols);
    for (double& v : t.data) {
        v = static_cast<double>(r.f32());
    }
    return t;
}

}  // namespace

std::vector<std::uint8_t> encode_payload(const SparsePayload& payload) {
    payload.validate();
    for (const auto& entries : payload.samples) {
        if (entries.size() != payload.k) {
            throw InputError("encode_payload: every sample must carry exactly k entries");
        }
    }
    detail::ByteWriter w;
    write_header(w, Header{PayloadKind::Sparse, payload.client_id, payload.round,
                           payload.num_samples, payload.dim_c, payload.k, 0});
    for (const auto& entries : payload.samples) {
        for (const auto& e : entries) {
            w.u32(e.index);
            w.f32(static_cast<float>(e.value));
        }
    }
    return w.take();
}

std::vector<std::uint8_t> encode_payload(const TeacherPayload& payload) {
    const auto& logits = payload.logits;
    const auto& proj = payload.projections;
    if (proj.rank > 0 && proj.num_samples() != logits.num_samples()) {
        throw ShapeError("encode_payload: projection sample count != logit sample count");
    }
    detail::ByteWriter w;
    write_header(w, Header{PayloadKind::Teacher, kServerClientId, payload.round,
                           static_cast<std::uint32_t>(logits.num_samples()),
                           static_cast<std::uint32_t>(logits.dim_c()),
                           static_cast<std::uint32_t>(logits.dim_c()), proj.rank});
    write_f32_matrix(w, logits.values);
    write_f32_matrix(w, proj.values);
    return w.take();
}

std::vector<std::uint8_t> encode_payload(const ProjectionPayload& payload) {
    detail::ByteWriter w;
    write_header(w, Header{PayloadKind::Projection, payload.client_id, payload.round,
                           static_cast<std::uint32_t>(payload.bundle.num_samples()), 0, 0,
                           payload.bundle.rank});
    write_f32_matrix(w, payload.bundle.values);
    return w.take();
}

DecodedPayload decode_payload(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    const Header h = read_header(r);
    switch (h.kind) {
        case PayloadKind::Sparse: {
            SparsePayload p;
            p.client_id = h.client_id;
            p.round = h.round;
            p.num_samples = h.num_samples;
            p.dim_c = h.dim_c;
            p.k = h.k;
            if (h.k > h.dim_c) {
                throw DecodeError(DecodeError::Code::BadLayout, "k exceeds dim_c");
            }
            p.samples.resize(h.num_samples);
            for (auto& entries : p.samples) {
                entries.reserve(h.k);
                std::uint32_t prev = 0;
                for (std::uint32_t j = 0; j < h.k; ++j) {
                    SparseEntry e;
                    e.index = r.u32();
                    e.value = static_cast<double>(r.f32());
                    if (e.index >= h.dim_c || (j > 0 && e.index <= prev)) {
                        throw DecodeError(DecodeError::Code::BadLayout,
                                          "entry indices not strictly increasing within dim_c");
                    }
                    prev = e.index;
                    entries.push_back(e);
                }
            }
            if (!r.done()) {
                throw DecodeError(DecodeError::Code::BadLayout, "trailing bytes");
            }
            return p;
        }
        case PayloadKind::Teacher: {
            TeacherPayload p;
            p.round = h.round;
            p.logits = DenseLogits(read_f32_matrix(r, h.num_samples, h.dim_c));
            p.projections.rank = h.rank;
            p.projections.values = read_f32_matrix(r, h.rank > 0 ? h.num_samples : 0, h.rank);
            if (!r.done()) {
                throw DecodeError(DecodeError::Code::BadLayout, "trailing bytes");
            }
            return p;
        }
        case PayloadKind::Projection: {
            ProjectionPayload p;
            p.client_id = h.client_id;
            p.round = h.round;
            p.bundle.rank = h.rank;
            p.bundle.values = read_f32_matrix(r, h.num_samples, h.rank);
            if (!r.done()) {
                throw DecodeError(DecodeError::Code::BadLayout, "trailing bytes");
            }
            return p;
        }
    }
    throw DecodeError(DecodeError::Code::BadKind, "unreachable payload kind");
}

std::uint64_t payload_size_bits(const SparsePayload& payload) {
    std::uint64_t entries = 0;
    for (const auto& s : payload.samples) {
        entries += s.size();
    }
    return kWireHeaderBits + entries * 64;
}

std::uint64_t payload_size_bits(const TeacherPayload& payload) {
    const std::uint64_t n = payload.logits.num_samples();
    return kWireHeaderBits + n * payload.logits.dim_c() * 32 +
           n * payload.projections.rank * 32;
}

std::uint64_t payload_size_bits(const ProjectionPayload& payload) {
    return kWireHeaderBits + payload.bundle.num_samples() * payload.bundle.rank * 32ULL;
}

}  // namespace fdsim
