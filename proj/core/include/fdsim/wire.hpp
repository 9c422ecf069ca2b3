#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fdsim/logits.hpp"

namespace fdsim {

/// client_id carried by server-originated blobs.
inline constexpr std::uint32_t kServerClientId = 0xFFFFFFFFu;

/// Shared blob header:
///   magic "ADLD" (4 bytes), version u16, payload kind u8,
///   client_id u32, round u32, num_samples u32, dim_c u32, k u32, rank u32.
inline constexpr std::size_t kWireHeaderBytes = 31;
inline constexpr std::uint64_t kWireHeaderBits = kWireHeaderBytes * 8;

enum class PayloadKind : std::uint8_t { Sparse = 1, Teacher = 2, Projection = 3 };

/// Bodies (little-endian, values rounded to IEEE-754 single precision):
///   Sparse:     per sample, exactly k pairs of (index u32, value f32),
///               ascending index. 64 bits per entry -- the channel's d.
///   Teacher:    num_samples*dim_c logit f32 row-major, then
///               num_samples*rank projection f32 row-major.
///   Projection: num_samples*rank f32 row-major.
std::vector<std::uint8_t> encode_payload(const SparsePayload& payload);
std::vector<std::uint8_t> encode_payload(const TeacherPayload& payload);
std::vector<std::uint8_t> encode_payload(const ProjectionPayload& payload);

using DecodedPayload = std::variant<SparsePayload, TeacherPayload, ProjectionPayload>;

/// Inverse of encode_payload up to the single-precision rounding already
/// applied on the wire. Throws DecodeError with a distinct code for a bad
/// magic, an unknown version, truncation, and layout violations.
DecodedPayload decode_payload(std::span<const std::uint8_t> bytes);

/// Exact codec size. encode_payload(p).size() * 8 == payload_size_bits(p).
std::uint64_t payload_size_bits(const SparsePayload& payload);
std::uint64_t payload_size_bits(const TeacherPayload& payload);
std::uint64_t payload_size_bits(const ProjectionPayload& payload);

}  // namespace fdsim
