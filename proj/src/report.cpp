#include "pluri/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pluri/io.hpp"

namespace pluri::lab {

using nlohmann::json;

namespace {

json number(double x) {
  if (std::isfinite(x)) return x;
  return io::format_double(x);
}

double read_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  const auto s = v.get<std::string>();
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  if (s == "nan") return std::nan("");
  throw std::invalid_argument("report: bad number '" + s + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '|') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace

ReportFormat parse_format(const std::string& text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  if (text == "md") return ReportFormat::md;
  throw std::invalid_argument("unknown format '" + text + "' (use csv, json or md)");
}

std::string extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
    case ReportFormat::md: return "md";
  }
  return "txt";
}

json to_json(const ExperimentReport& report) {
  json rows = json::array();
  for (const CheckRow& r : report.rows) {
    json row = {{"name", r.name}, {"kind", r.kind == CheckRow::Kind::value ? "value" : "predicate"}, {"pass", r.pass}};
    if (r.kind == CheckRow::Kind::value) {
      row["expected"] = number(r.expected);
      row["observed"] = number(r.observed);
      row["tolerance"] = number(r.tolerance);
    } else {
      row["expected"] = r.expected != 0.0;
      row["observed"] = r.observed != 0.0;
    }
    if (!r.detail.empty()) row["detail"] = r.detail;
    rows.push_back(std::move(row));
  }
  return {{"experiment", report.id},
          {"seed", report.seed},
          {"passed", report.passed()},
          {"pass_count", report.pass_count()},
          {"check_count", report.rows.size()},
          {"checks", std::move(rows)},
          {"artifacts", report.artifacts}};
}

ExperimentReport from_json(const json& doc) {
  ExperimentReport rep;
  rep.id = doc.at("experiment").get<std::string>();
  rep.seed = doc.at("seed").get<std::string>();
  for (const json& row : doc.at("checks")) {
    CheckRow r;
    r.name = row.at("name").get<std::string>();
    r.pass = row.at("pass").get<bool>();
    if (row.at("kind") == "value") {
      r.kind = CheckRow::Kind::value;
      r.expected = read_number(row.at("expected"));
      r.observed = read_number(row.at("observed"));
      r.tolerance = read_number(row.at("tolerance"));
    } else {
      r.kind = CheckRow::Kind::predicate;
      r.expected = row.at("expected").get<bool>() ? 1.0 : 0.0;
      r.observed = row.at("observed").get<bool>() ? 1.0 : 0.0;
    }
    if (row.contains("detail")) r.detail = row["detail"].get<std::string>();
    rep.rows.push_back(std::move(r));
  }
  rep.artifacts = doc.at("artifacts").get<std::vector<std::string>>();
  return rep;
}

std::string render_json(const ExperimentReport& report) { return to_json(report).dump(2) + "\n"; }

std::string render_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "experiment,name,kind,expected,observed,tolerance,pass,detail\n";
  for (const CheckRow& r : report.rows) {
    const bool value = r.kind == CheckRow::Kind::value;
    out << csv_field(report.id) << ',' << csv_field(r.name) << ',' << (value ? "value" : "predicate") << ','
        << (value ? io::format_double(r.expected) : (r.expected != 0 ? "true" : "false")) << ','
        << (value ? io::format_double(r.observed) : (r.observed != 0 ? "true" : "false")) << ','
        << (value ? io::format_double(r.tolerance) : "") << ',' << (r.pass ? 1 : 0) << ',' << csv_field(r.detail) << '\n';
  }
  return out.str();
}

std::string render_markdown(const ExperimentReport& report) {
  std::ostringstream out;
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", report.wall_seconds);
  out << "# " << report.id << "\n\n";
  out << "| experiment | passed | checks | verdict |\n|---|---|---|---|\n";
  out << "| " << report.id << " | " << report.pass_count() << " | " << report.rows.size() << " | "
      << (report.passed() ? "PASS" : "FAIL") << " |\n\n";
  out << "seed: `" << report.seed << "`, wall time: " << wall << " s\n\n";
  out << "| check | expected | observed | tolerance | result | detail |\n|---|---|---|---|---|---|\n";
  for (const CheckRow& r : report.rows) {
    const bool value = r.kind == CheckRow::Kind::value;
    out << "| " << md_cell(r.name) << " | "
        << (value ? io::format_double(r.expected) : (r.expected != 0 ? "true" : "false")) << " | "
        << (value ? io::format_double(r.observed) : (r.observed != 0 ? "true" : "false")) << " | "
        << (value ? io::format_double(r.tolerance) : "") << " | " << (r.pass ? "pass" : "FAIL") << " | "
        << md_cell(r.detail) << " |\n";
  }
  if (!report.artifacts.empty()) {
    out << "\nArtifacts:\n\n";
    for (const auto& a : report.artifacts) out << "- `" << a << "`\n";
  }
  return out.str();
}

std::filesystem::path emit_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (report.id + "." + extension(format));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::IoError("cannot open " + path.string() + " for writing");
  switch (format) {
    case ReportFormat::csv: out << render_csv(report); break;
    case ReportFormat::json: out << render_json(report); break;
    case ReportFormat::md: out << render_markdown(report); break;
  }
  out.flush();
  if (!out) throw io::IoError("write failed: " + path.string());
  return path;
}

}  // namespace pluri::lab
