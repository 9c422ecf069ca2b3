#pragma once

#include <cstdint>
#include <optional>

#include "fdsim/error.hpp"

namespace fdsim {

/// Per-client, per-round AWGN link conditions. Together with the logit
/// dimension these determine the Top-k uplink budget.
struct ChannelState {
    double bandwidth_hz = 0.0;       // B
    double snr_linear = 0.0;         // power ratio, dimensionless
    double eta = 0.5;                // channel-usage fraction, in (0, 1)
    double time_budget_s = 0.0;      // T, max transmission time per round
    std::uint32_t bits_per_entry = 64;  // d, one logit value + its index

    void validate() const;

    bool operator==(const ChannelState&) const = default;
};

/// Uniform per-(client, round) draws of SNR (in dB) and eta; everything
/// else fixed. Fully deterministic given the seed.
struct ChannelModelConfig {
    double snr_db_lo = 5.0;
    double snr_db_hi = 20.0;
    double eta_lo = 0.2;
    double eta_hi = 0.8;
    double bandwidth_hz = 1e5;
    double time_budget_s = 2e-3;
    std::uint32_t bits_per_entry = 64;
    std::uint64_t seed = 0;

    void validate() const;

    bool operator==(const ChannelModelConfig&) const = default;
};

/// Shannon capacity C = B log2(1 + SNR), bits per second.
double capacity(const ChannelState& state);

/// floor(eta * C * T / d), clamped to dim_c. nullopt signals BudgetZero:
/// the budget cannot fit even one entry and the caller must apply the
/// round-skip policy. When the returned k satisfies 1 <= k < dim_c it is
/// tight: k*d <= eta*C*T < (k+1)*d in the same double arithmetic.
std::optional<std::uint32_t> top_k_budget(const ChannelState& state, std::uint32_t dim_c);

/// Deterministic in (cfg.seed, client_id, round).
ChannelState sample_channel_state(const ChannelModelConfig& cfg, std::uint32_t client_id,
                                  std::uint32_t round);

}  // namespace fdsim
