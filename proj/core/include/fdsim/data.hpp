#pragma once

#include <cstdint>
#include <vector>

#include "fdsim/tensor.hpp"

namespace fdsim {

/// Labeled feature matrix. Private shards and held-out sets use this; the
/// public set is features only, so trainers cannot touch its labels.
struct Dataset {
    Tensor2D features;       // size x feature_dim
    std::vector<int> labels; // size

    std::size_t size() const { return features.rows; }

    bool operator==(const Dataset&) const = default;
};

struct SyntheticTaskConfig {
    std::size_t num_classes = 10;
    std::size_t feature_dim = 32;
    std::size_t samples_per_class = 200;
    double cluster_spread = 2.0;
    std::size_t public_set_size = 500;
    std::size_t test_samples = 1000;

    void validate() const;

    bool operator==(const SyntheticTaskConfig&) const = default;
};

struct SyntheticData {
    Dataset pool;               // labeled training pool, to be partitioned
    Tensor2D public_features;   // D_p; labels withheld by construction
    Dataset heldout;            // evaluation only
    Tensor2D class_means;       // num_classes x feature_dim, diagnostics
};

/// One Gaussian cluster per class: means ~ N(0, I), samples = mean +
/// spread * N(0, I). The public set and held-out set draw from the same
/// mixture on their own seed streams; public labels are discarded.
SyntheticData synthetic_dataset_gen(const SyntheticTaskConfig& cfg, std::uint64_t seed);

/// Per class, proportions ~ Dirichlet(gamma, ..., gamma) over the clients,
/// then the class's samples split accordingly. Every sample lands in
/// exactly one shard; a client left empty receives one sample donated by
/// the largest shard.
std::vector<Dataset> dirichlet_partition(const Dataset& pool, std::size_t num_clients,
                                         double gamma, std::uint64_t seed);

}  // namespace fdsim
