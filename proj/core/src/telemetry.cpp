#include "fdsim/telemetry.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fdsim {

namespace {

using nlohmann::json;

constexpr const char* kHeader =
    "round,strategy,seed,server_accuracy,mean_client_accuracy,loss_logits,loss_h,"
    "uplink_bytes,downlink_bytes,cumulative_bytes";

/// Shortest representation that parses back to the same double.
std::string format_double(double v) {
    return json(v).dump();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_double(const std::string& s, std::size_t line_no, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ParseError(line_no, std::string("bad ") + what + " value '" + s + "'");
    }
}

std::uint64_t parse_u64(const std::string& s, std::size_t line_no, const char* what) {
    std::uint64_t v = 0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(line_no, std::string("bad ") + what + " value '" + s + "'");
    }
    return v;
}

}  // namespace

const RoundRecord& RoundLog::record_round(RoundRecord record) {
    cumulative_ += record.uplink_bytes + record.downlink_bytes;
    record.cumulative_bytes = cumulative_;
    records_.push_back(std::move(record));
    return records_.back();
}

std::vector<SummaryRow> summarize(const std::vector<RoundRecord>& records,
                                  std::span<const double> thresholds) {
    if (records.empty()) {
        throw InputError("summarize: no records");
    }
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].round <= records[i - 1].round) {
            throw InputError("summarize: records not sorted by round");
        }
    }
    std::vector<SummaryRow> rows;
    rows.reserve(thresholds.size());
    for (double threshold : thresholds) {
        SummaryRow row;
        row.strategy = records.front().strategy;
        row.accuracy_threshold = threshold;
        std::uint64_t uplink = 0;
        std::uint64_t downlink = 0;
        for (const auto& r : records) {
            uplink += r.uplink_bytes;
            downlink += r.downlink_bytes;
            if (r.server_accuracy >= threshold) {
                row.reached = true;
                row.rounds_to_threshold = r.round;
                row.uplink_bytes_to_threshold = uplink;
                row.downlink_bytes_to_threshold = downlink;
                row.total_bytes_to_threshold = r.cumulative_bytes;
                break;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string logs_to_csv(const std::vector<RoundRecord>& records) {
    std::ostringstream out;
    out << kHeader << '\n';
    for (const auto& r : records) {
        out << r.round << ',' << r.strategy << ',' << r.seed << ','
            << format_double(r.server_accuracy) << ',' << format_double(r.mean_client_accuracy)
            << ',' << format_double(r.loss_logits) << ',' << format_double(r.loss_h) << ','
            << r.uplink_bytes << ',' << r.downlink_bytes << ',' << r.cumulative_bytes << '\n';
    }
    return out.str();
}

std::vector<RoundRecord> logs_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<RoundRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line != kHeader) {
                throw ParseError(1, "unexpected CSV header");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 10) {
            throw ParseError(line_no, "expected 10 fields, got " + std::to_string(fields.size()));
        }
        RoundRecord r;
        r.round = static_cast<std::uint32_t>(parse_u64(fields[0], line_no, "round"));
        r.strategy = fields[1];
        r.seed = parse_u64(fields[2], line_no, "seed");
        r.server_accuracy = parse_double(fields[3], line_no, "server_accuracy");
        r.mean_client_accuracy = parse_double(fields[4], line_no, "mean_client_accuracy");
        r.loss_logits = parse_double(fields[5], line_no, "loss_logits");
        r.loss_h = parse_double(fields[6], line_no, "loss_h");
        r.uplink_bytes = parse_u64(fields[7], line_no, "uplink_bytes");
        r.downlink_bytes = parse_u64(fields[8], line_no, "downlink_bytes");
        r.cumulative_bytes = parse_u64(fields[9], line_no, "cumulative_bytes");
        records.push_back(std::move(r));
    }
    return records;
}

void write_logs(const std::vector<RoundRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << logs_to_csv(records);
    if (!out) {
        throw Error("short write to " + path.string());
    }
}

std::vector<RoundRecord> read_logs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return logs_from_csv(buffer.str());
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "strategy,accuracy_threshold,reached,rounds_to_threshold,"
           "uplink_bytes_to_threshold,downlink_bytes_to_threshold,total_bytes_to_threshold\n";
    for (const auto& r : rows) {
        out << r.strategy << ',' << format_double(r.accuracy_threshold) << ','
            << (r.reached ? "true" : "false") << ',';
        if (r.reached) {
            out << r.rounds_to_threshold << ',' << r.uplink_bytes_to_threshold << ','
                << r.downlink_bytes_to_threshold << ',' << r.total_bytes_to_threshold;
        } else {
            out << "unreached,unreached,unreached,unreached";
        }
        out << '\n';
    }
    return out.str();
}

std::string summary_to_json(const std::vector<SummaryRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json row;
        row["strategy"] = r.strategy;
        row["accuracy_threshold"] = r.accuracy_threshold;
        row["reached"] = r.reached;
        if (r.reached) {
            row["rounds_to_threshold"] = r.rounds_to_threshold;
            row["uplink_bytes_to_threshold"] = r.uplink_bytes_to_threshold;
            row["downlink_bytes_to_threshold"] = r.downlink_bytes_to_threshold;
            row["total_bytes_to_threshold"] = r.total_bytes_to_threshold;
        } else {
            row["rounds_to_threshold"] = nullptr;
            row["uplink_bytes_to_threshold"] = nullptr;
            row["downlink_bytes_to_threshold"] = nullptr;
            row["total_bytes_to_threshold"] = nullptr;
        }
        arr.push_back(std::move(row));
    }
    return arr.dump(2) + "\n";
}

}  // namespace fdsim
