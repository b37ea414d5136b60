#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "uatpc/types.hpp"

namespace uatpc {

enum class MeasurementFormat { jsonl, csv };

MeasurementFormat parse_format(std::string_view name);

struct RejectedLine {
    std::size_t line = 0; // 1-based
    std::string reason;
};

struct ParseResult {
    std::vector<MeasurementRecord> records;
    std::vector<RejectedLine> rejects;
    std::size_t lines_read = 0;     // non-blank data lines
    std::size_t lines_accepted = 0; // lines_accepted + rejects.size() == lines_read
};

/// Reads 802.11k samples. JSON-lines carry one record per line; CSV is long
/// format (`ts,sta,serving,ap_id,pl_db`) and consecutive rows sharing
/// (ts, sta, serving) form one record. When `topology` is given, records
/// naming unknown APs are rejected.
ParseResult parse_measurements(const std::filesystem::path& path, MeasurementFormat format,
                               const NetworkInstance* topology = nullptr);

ParseResult parse_measurements_jsonl(std::string_view text, const NetworkInstance* topology = nullptr);
ParseResult parse_measurements_csv(std::string_view text, const NetworkInstance* topology = nullptr);

void write_measurements_jsonl(const std::filesystem::path& path, const std::vector<MeasurementRecord>& records);
std::string measurement_to_jsonl(const MeasurementRecord& record);

/// Missing directed readings (JSON null) and asymmetry are resolved here.
NetworkInstance load_instance(const std::filesystem::path& topology_path);
NetworkInstance parse_instance(std::string_view json_text);
std::string instance_to_json(const NetworkInstance& instance);
void save_instance(const std::filesystem::path& path, const NetworkInstance& instance);

/// Fills in missing directed AP-AP readings: mean of both directions, the
/// single available one, or `missing_pl_db` when neither exists.
Matrix symmetrize_ap_pl(const std::vector<std::vector<double>>& directed, double missing_pl_db = 100.0);

std::string power_config_to_json(const NetworkInstance& instance, const PowerConfig& config);
PowerConfig parse_power_config(const NetworkInstance& instance, std::string_view json_text);
PowerConfig load_power_config(const NetworkInstance& instance, const std::filesystem::path& path);

/// `origin_id,<ap id>...` header followed by one row per RP.
std::string rps_to_csv(const NetworkInstance& instance, const ReferencePointSet& rps);
void save_rps_csv(const std::filesystem::path& path, const NetworkInstance& instance, const ReferencePointSet& rps);
ReferencePointSet load_rps_csv(const std::filesystem::path& path, const NetworkInstance& instance);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double value);

} // namespace uatpc
