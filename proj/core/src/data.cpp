#include "fdsim/data.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "fdsim/rng.hpp"

namespace fdsim {

namespace {

Dataset sample_mixture(const Tensor2D& means, double spread, std::size_t count, Rng& rng) {
    const std::size_t num_classes = means.rows;
    const std::size_t dim = means.cols;
    Dataset out;
    out.features = Tensor2D(count, dim);
    out.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto label = static_cast<int>(rng.below(num_classes));
        out.labels[i] = label;
        const double* mean = means.row(static_cast<std::size_t>(label));
        double* row = out.features.row(i);
        for (std::size_t j = 0; j < dim; ++j) {
            row[j] = mean[j] + spread * rng.normal();
        }
    }
    return out;
}

}  // namespace

void SyntheticTaskConfig::validate() const {
    if (num_classes < 2) {
        throw InputError("SyntheticTaskConfig: num_classes must be >= 2");
    }
    if (feature_dim < 1 || samples_per_class < 1) {
        throw InputError("SyntheticTaskConfig: feature_dim and samples_per_class must be >= 1");
    }
    if (!(cluster_spread >= 0.0)) {
        throw InputError("SyntheticTaskConfig: cluster_spread must be >= 0");
    }
}

SyntheticData synthetic_dataset_gen(const SyntheticTaskConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    SyntheticData data;

    Rng mean_rng(derive_seed(seed, "class_means"));
    data.class_means = gaussian_tensor(cfg.num_classes, cfg.feature_dim, 1.0, mean_rng);

    // Balanced labeled pool: samples_per_class for each class, interleaved
    // so contiguous slices stay class-mixed.
    const std::size_t pool_size = cfg.num_classes * cfg.samples_per_class;
    data.pool.features = Tensor2D(pool_size, cfg.feature_dim);
    data.pool.labels.resize(pool_size);
    Rng pool_rng(derive_seed(seed, "pool"));
    for (std::size_t i = 0; i < pool_size; ++i) {
        const int label = static_cast<int>(i % cfg.num_classes);
        data.pool.labels[i] = label;
        const double* mean = data.class_means.row(static_cast<std::size_t>(label));
        double* row = data.pool.features.row(i);
        for (std::size_t j = 0; j < cfg.feature_dim; ++j) {
            row[j] = mean[j] + cfg.cluster_spread * pool_rng.normal();
        }
    }

    Rng public_rng(derive_seed(seed, "public"));
    Dataset public_labeled =
        sample_mixture(data.class_means, cfg.cluster_spread, cfg.public_set_size, public_rng);
    data.public_features = std::move(public_labeled.features);  // labels dropped here

    Rng test_rng(derive_seed(seed, "heldout"));
    data.heldout = sample_mixture(data.class_means, cfg.cluster_spread, cfg.test_samples, test_rng);
    return data;
}

std::vector<Dataset> dirichlet_partition(const Dataset& pool, std::size_t num_clients,
                                         double gamma, std::uint64_t seed) {
    if (num_clients < 1) {
        throw InputError("dirichlet_partition: num_clients must be >= 1");
    }
    if (!(gamma > 0.0)) {
        throw InputError("dirichlet_partition: gamma must be > 0");
    }
    if (pool.size() < num_clients) {
        throw InputError("dirichlet_partition: pool smaller than client count (" +
                         std::to_string(pool.size()) + " < " + std::to_string(num_clients) + ")");
    }
    if (pool.labels.size() != pool.size()) {
        throw ShapeError("dirichlet_partition: label count != sample count");
    }

    const int num_classes = 1 + *std::max_element(pool.labels.begin(), pool.labels.end());
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < pool.size(); ++i) {
        by_class[static_cast<std::size_t>(pool.labels[i])].push_back(i);
    }

    Rng rng(derive_seed(seed, "dirichlet"));
    std::vector<std::vector<std::size_t>> shard_rows(num_clients);
    for (auto& rows : by_class) {
        // Shuffle the class's rows, draw Dirichlet proportions, then cut.
        for (std::size_t i = rows.size(); i > 1; --i) {
            std::swap(rows[i - 1], rows[rng.below(i)]);
        }
        std::vector<double> weights(num_clients);
        double total = 0.0;
        for (double& w : weights) {
            w = rng.gamma(gamma);
            total += w;
        }
        // Largest-remainder apportionment so counts sum to the class size.
        std::vector<std::size_t> counts(num_clients, 0);
        std::vector<std::pair<double, std::size_t>> remainders(num_clients);
        std::size_t assigned = 0;
        for (std::size_t cl = 0; cl < num_clients; ++cl) {
            const double exact = weights[cl] / total * static_cast<double>(rows.size());
            counts[cl] = static_cast<std::size_t>(exact);
            remainders[cl] = {exact - static_cast<double>(counts[cl]), cl};
            assigned += counts[cl];
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) {
                return a.first > b.first;
            }
            return a.second < b.second;
        });
        for (std::size_t i = 0; assigned < rows.size(); ++i, ++assigned) {
            ++counts[remainders[i % num_clients].second];
        }
        std::size_t cursor = 0;
        for (std::size_t cl = 0; cl < num_clients; ++cl) {
            for (std::size_t i = 0; i < counts[cl]; ++i) {
                shard_rows[cl].push_back(rows[cursor++]);
            }
        }
    }

    // Donate one sample to any empty shard from the currently largest one.
    for (std::size_t cl = 0; cl < num_clients; ++cl) {
        if (!shard_rows[cl].empty()) {
            continue;
        }
        std::size_t donor = 0;
        for (std::size_t other = 1; other < num_clients; ++other) {
            if (shard_rows[other].size() > shard_rows[donor].size()) {
                donor = other;
            }
        }
        shard_rows[cl].push_back(shard_rows[donor].back());
        shard_rows[donor].pop_back();
    }

    std::vector<Dataset> shards(num_clients);
    for (std::size_t cl = 0; cl < num_clients; ++cl) {
        std::sort(shard_rows[cl].begin(), shard_rows[cl].end());
        Dataset& shard = shards[cl];
        shard.features = Tensor2D(shard_rows[cl].size(), pool.features.cols);
        shard.labels.resize(shard_rows[cl].size());
        for (std::size_t i = 0; i < shard_rows[cl].size(); ++i) {
            const std::size_t src = shard_rows[cl][i];
            std::copy(pool.features.row(src), pool.features.row(src) + pool.features.cols,
                      shard.features.row(i));
            shard.labels[i] = pool.labels[src];
        }
    }
    return shards;
}

}  // namespace fdsim
