#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fdsim/channel.hpp"
#include "fdsim/data.hpp"
#include "fdsim/distill.hpp"
#include "fdsim/logits.hpp"
#include "fdsim/model.hpp"
#include "fdsim/telemetry.hpp"
#include "fdsim/wire.hpp"

namespace fdsim {

enum class Strategy : std::uint8_t {
    AdaLD = 0,     // channel-budgeted Top-k, adaptive aggregation, projection loss
    Adaptive = 1,  // channel-budgeted Top-k, adaptive aggregation, logits only
    ZeroPad = 2,   // channel-budgeted Top-k, zero-padding mean
    AllLogits = 3  // dense uplinks (k = c), plain mean
};

std::string_view strategy_name(Strategy s);
Strategy strategy_from_name(std::string_view name);  // throws InputError

/// Architecture knobs shared by both ends of the federation.
struct ModelLayout {
    std::vector<std::size_t> client_layers{32, 64, 10};
    std::vector<std::size_t> server_layers{32, 128, 10};
    Activation activation = Activation::Relu;
    std::vector<std::size_t> client_adapted;  // empty = every layer
    std::vector<std::size_t> server_adapted;  // empty = every layer
    std::uint32_t lora_rank = 8;
    double lora_alpha = 32.0;

    void validate() const;

    bool operator==(const ModelLayout&) const = default;
};

struct FedConfig {
    std::size_t num_clients = 20;
    std::size_t clients_per_round = 10;
    std::size_t rounds = 30;
    Strategy strategy = Strategy::AdaLD;
    double dirichlet_gamma = 0.5;
    std::uint64_t seed = 0;
    /// Broadcast the raw client aggregate {K_g, h_g} instead of the
    /// server's own post-distillation knowledge.
    bool broadcast_raw_aggregate = false;
    /// Scale wire projections by alpha/rank.
    bool scale_projections = false;

    SyntheticTaskConfig data;
    ModelLayout model;
    TrainConfig train;
    DistillConfig distill;
    ChannelModelConfig channel;

    void validate() const;
    ModelSpec client_spec() const;
    ModelSpec server_spec() const;

    bool operator==(const FedConfig&) const = default;
};

enum class Stage : std::uint8_t {
    Broadcast = 0,
    ClientDistill = 1,
    ClientLocalTrain = 2,
    ClientUpload = 3,
    ClientSkip = 4,
    ServerAggregate = 5,
    ServerDistill = 6
};

std::string_view stage_name(Stage s);

struct Event {
    std::uint32_t round = 0;
    Stage stage = Stage::Broadcast;
    std::uint32_t actor = 0;  // client id, or kServerClientId for the server

    bool operator==(const Event&) const = default;
};

/// Uniform sample of m client ids without replacement, ascending,
/// deterministic in (seed, round).
std::vector<std::uint32_t> select_clients(std::size_t num_clients, std::size_t m,
                                          std::uint32_t round, std::uint64_t seed);

/// What a strategy asks of its clients.
struct ClientPolicy {
    double lambda_h = 0.0;
    bool upload_projections = false;
    bool channel_limited = true;
};

ClientPolicy policy_for(Strategy s, const DistillConfig& distill);

struct ClientRoundResult {
    std::optional<SparsePayload> payload;          // nullopt: BudgetZero skip
    std::optional<ProjectionPayload> projections;  // only under AdaLD, only when not skipped
    double distill_loss_logits = 0.0;
    double distill_loss_h = 0.0;
    double local_loss = 0.0;
    std::vector<Event> events;
};

/// One client's turn: distill against the broadcast over the public set,
/// run the supervised local epochs, re-infer, then sparsify under the
/// channel budget. On BudgetZero the client uploads nothing this round.
ClientRoundResult client_round(ModelState& client, const TeacherPayload& broadcast,
                               const Dataset& shard, const Tensor2D& public_features,
                               const ChannelState& channel, std::uint32_t client_id,
                               std::uint32_t round, const FedConfig& cfg);

struct ServerRoundMetrics {
    double loss_logits = 0.0;  // Eq. 9 pieces on the full public set, pre-update
    double loss_h = 0.0;
    bool updated = false;
};

/// Aggregates uplinks per strategy, distills the server against the
/// aggregate, and returns the next broadcast. With no uplinks the server
/// stays untouched and re-broadcasts its current knowledge.
TeacherPayload server_round(ModelState& server, const std::vector<SparsePayload>& uplinks,
                            const std::vector<ProjectionBundle>& bundles,
                            const Tensor2D& public_features, std::uint32_t round,
                            const FedConfig& cfg, ServerRoundMetrics* metrics,
                            std::vector<Event>* events);

struct RunLog {
    std::vector<RoundRecord> rounds;
    std::vector<Event> events;
    double initial_server_accuracy = 0.0;
};

/// The full federation loop; a pure function of cfg. Parallelism across
/// clients is capped by the FDSIM_THREADS environment variable and never
/// changes results.
RunLog run_experiment(const FedConfig& cfg);

}  // namespace fdsim
