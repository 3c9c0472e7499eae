#pragma once

#include "pgpu/harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace pgpu {

/// Relative csv paths resolve against `base_dir`. Throws InvalidInput on
/// unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const ExperimentConfig& config);

ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json records_to_json(const std::vector<ResultRecord>& records);

enum class ReportFormat { csv, json, markdown };
ReportFormat report_format_from_string(const std::string& name);

/// Renders the summary.json written by write_results.
std::string render_report(const nlohmann::json& summary, ReportFormat format);

}  // namespace pgpu
