#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fdsim/model.hpp"

namespace fdsim {

/// Versioned binary model checkpoint.
///
/// Layout (little-endian):
///   magic "FDSM", format version u16,
///   num_layers u32, per layer (d_in u32, d_out u32),
///   activation u8, num_classes u32,
///   num_adapted u32, per adapted layer (layer_index u32, rank u32, alpha f64),
///   then every tensor as IEEE-754 float64 in declaration order:
///   per layer W' then bias, then per adapted layer A then B.
std::vector<std::uint8_t> serialize_model(const ModelState& model);
ModelState deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const ModelState& model, const std::filesystem::path& path);
ModelState load_model(const std::filesystem::path& path);

/// Just the frozen tensors, for byte-identity checks across training.
std::vector<std::uint8_t> serialize_frozen_weights(const ModelState& model);

}  // namespace fdsim
