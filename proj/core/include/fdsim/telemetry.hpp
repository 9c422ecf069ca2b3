#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fdsim/error.hpp"

namespace fdsim {

/// One row per communication round. Byte fields are exact codec sizes;
/// cumulative_bytes folds uplink + downlink across rounds.
struct RoundRecord {
    std::uint32_t round = 0;
    std::string strategy;
    std::uint64_t seed = 0;
    double server_accuracy = 0.0;
    double mean_client_accuracy = 0.0;
    double loss_logits = 0.0;
    double loss_h = 0.0;
    std::uint64_t uplink_bytes = 0;
    std::uint64_t downlink_bytes = 0;
    std::uint64_t cumulative_bytes = 0;

    bool operator==(const RoundRecord&) const = default;
};

/// Appender that maintains the running byte total.
class RoundLog {
public:
    /// Fills record.cumulative_bytes from the running total and appends.
    const RoundRecord& record_round(RoundRecord record);
    const std::vector<RoundRecord>& records() const { return records_; }

private:
    std::vector<RoundRecord> records_;
    std::uint64_t cumulative_ = 0;
};

/// First-crossing cost of reaching an accuracy threshold. Uplink, downlink
/// and their total are reported separately; `reached` false means the run
/// never crossed (no interpolation, no extrapolation).
struct SummaryRow {
    std::string strategy;
    double accuracy_threshold = 0.0;
    bool reached = false;
    std::uint32_t rounds_to_threshold = 0;
    std::uint64_t uplink_bytes_to_threshold = 0;
    std::uint64_t downlink_bytes_to_threshold = 0;
    std::uint64_t total_bytes_to_threshold = 0;

    bool operator==(const SummaryRow&) const = default;
};

/// Records must be sorted by round and nonempty. The first round whose
/// server_accuracy >= threshold wins, even if accuracy later dips.
std::vector<SummaryRow> summarize(const std::vector<RoundRecord>& records,
                                  std::span<const double> thresholds);

/// CSV with exactly the RoundRecord fields in declaration order plus a
/// header row. Doubles are written in shortest round-trip form.
void write_logs(const std::vector<RoundRecord>& records, const std::filesystem::path& path);

/// Inverse of write_logs; malformed rows raise ParseError with the line.
std::vector<RoundRecord> read_logs(const std::filesystem::path& path);

/// Serialized forms used by write_logs/read_logs and the CLI.
std::string logs_to_csv(const std::vector<RoundRecord>& records);
std::vector<RoundRecord> logs_from_csv(const std::string& text);

std::string summary_to_csv(const std::vector<SummaryRow>& rows);
std::string summary_to_json(const std::vector<SummaryRow>& rows);

}  // namespace fdsim
