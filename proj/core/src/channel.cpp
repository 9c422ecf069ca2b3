#include "fdsim/channel.hpp"

#include <cmath>

#include "fdsim/rng.hpp"

namespace fdsim {

void ChannelState::validate() const {
    if (bandwidth_hz < 0.0 || !std::isfinite(bandwidth_hz)) {
        throw InputError("ChannelState: bandwidth_hz must be >= 0");
    }
    if (snr_linear < 0.0 || !std::isfinite(snr_linear)) {
        throw InputError("ChannelState: snr_linear must be >= 0");
    }
    if (!(eta > 0.0 && eta < 1.0)) {
        throw InputError("ChannelState: eta must lie in (0, 1)");
    }
    if (!(time_budget_s > 0.0)) {
        throw InputError("ChannelState: time_budget_s must be > 0");
    }
    if (bits_per_entry < 2) {
        throw InputError("ChannelState: bits_per_entry must be >= 2");
    }
}

void ChannelModelConfig::validate() const {
    if (snr_db_lo > snr_db_hi) {
        throw InputError("ChannelModelConfig: snr_db range inverted");
    }
    if (eta_lo > eta_hi) {
        throw InputError("ChannelModelConfig: eta range inverted");
    }
    if (!(eta_lo > 0.0 && eta_hi < 1.0)) {
        throw InputError("ChannelModelConfig: eta range must lie inside (0, 1)");
    }
    ChannelState probe;
    probe.bandwidth_hz = bandwidth_hz;
    probe.snr_linear = std::pow(10.0, snr_db_lo / 10.0);
    probe.eta = eta_lo;
    probe.time_budget_s = time_budget_s;
    probe.bits_per_entry = bits_per_entry;
    probe.validate();
}

double capacity(const ChannelState& state) {
    return state.bandwidth_hz * std::log2(1.0 + state.snr_linear);
}

std::optional<std::uint32_t> top_k_budget(const ChannelState& state, std::uint32_t dim_c) {
    if (dim_c < 1) {
        throw InputError("top_k_budget: dim_c must be >= 1");
    }
    state.validate();
    const double budget_bits = state.eta * capacity(state) * state.time_budget_s;
    const double d = static_cast<double>(state.bits_per_entry);
    double k = std::floor(budget_bits / d);
    // floor() of the quotient can land on the wrong side of an integer
    // boundary after rounding; nudge until k*d <= budget < (k+1)*d holds in
    // the same arithmetic the budget law is stated in.
    while ((k + 1.0) * d <= budget_bits) {
        k += 1.0;
    }
    while (k > 0.0 && k * d > budget_bits) {
        k -= 1.0;
    }
    if (k < 1.0) {
        return std::nullopt;
    }
    if (k >= static_cast<double>(dim_c)) {
        return dim_c;
    }
    return static_cast<std::uint32_t>(k);
}

ChannelState sample_channel_state(const ChannelModelConfig& cfg, std::uint32_t client_id,
                                  std::uint32_t round) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, "channel", client_id, round));
    ChannelState state;
    state.bandwidth_hz = cfg.bandwidth_hz;
    const double snr_db = rng.uniform(cfg.snr_db_lo, cfg.snr_db_hi);
    state.snr_linear = std::pow(10.0, snr_db / 10.0);
    state.eta = rng.uniform(cfg.eta_lo, cfg.eta_hi);
    state.time_budget_s = cfg.time_budget_s;
    state.bits_per_entry = cfg.bits_per_entry;
    return state;
}

}  // namespace fdsim
