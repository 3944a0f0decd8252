#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tensorchan/experiment.hpp"

namespace tensorchan {

enum class ResultFormat { kCsv, kJson };

std::string_view to_string(ResultFormat f);
ResultFormat parse_result_format(std::string_view name);

inline constexpr std::string_view kCsvHeader =
    "estimator,pilot_ratio,snr_db,n_paths,run_index,nmse,nmse_db,iterations,wall_time_s,seed";

std::string format_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_csv(std::string_view text);
std::string format_json(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_json(std::string_view text);

/// CSV keeps the ten schema columns only; JSON also carries
/// observation_hash, failed and error.
void write_results(const std::vector<RunRecord>& records, const std::filesystem::path& path,
                   ResultFormat format);
std::vector<RunRecord> read_results(const std::filesystem::path& path, ResultFormat format);

/// Plot-ready curve and threshold tables.
std::string format_curves_csv(const std::vector<CurvePoint>& curves);
std::string format_thresholds_csv(const std::vector<ThresholdRecord>& thresholds);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace tensorchan
