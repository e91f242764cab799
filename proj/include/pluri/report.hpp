#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pluri/experiments.hpp"

namespace pluri::lab {

enum class ReportFormat { csv, json, md };
ReportFormat parse_format(const std::string& text);
std::string extension(ReportFormat format);

/// Wall time is left out so that equal runs serialize to equal bytes; non-finite
/// numbers are written as the strings "inf", "-inf" and "nan".
nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport from_json(const nlohmann::json& doc);

/// Two-space indented JSON followed by a newline.
std::string render_json(const ExperimentReport& report);
/// Header: experiment,name,kind,expected,observed,tolerance,pass,detail
std::string render_csv(const ExperimentReport& report);
/// Summary table with pass counts per experiment, the wall time, then one line per check.
std::string render_markdown(const ExperimentReport& report);

/// Writes <dir>/<id>.<ext> and returns its path.
std::filesystem::path emit_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& dir);

}  // namespace pluri::lab
