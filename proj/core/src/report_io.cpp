#include "expint/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace expint {

namespace {

std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("CSV line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  out << kCsvHeader << '\n';
  for (const auto& report : reports)
    for (const auto& row : report.rows)
      out << report.problem << ',' << report.method << ',' << row.k << ',' << fmt17(row.h) << ',' << row.steps << ','
          << fmt17(row.global_error) << ',' << fmt17(row.wall_time_total) << ',' << fmt17(row.wall_time_cache)
          << '\n';
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("CSV header mismatch");
  std::vector<CsvRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw ConfigError("CSV line " + std::to_string(number) + ": expected 8 fields");
    CsvRow r;
    r.problem = f[0];
    r.method = f[1];
    r.row.k = static_cast<int>(parse_double(f[2], number));
    r.row.h = parse_double(f[3], number);
    r.row.steps = static_cast<std::size_t>(parse_double(f[4], number));
    r.row.global_error = parse_double(f[5], number);
    r.row.wall_time_total = parse_double(f[6], number);
    r.row.wall_time_cache = parse_double(f[7], number);
    r.row.diverged = std::isinf(r.row.global_error);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& node, double null_value) {
  return node.is_null() ? null_value : node.get<double>();
}

}  // namespace

std::string reports_to_json(const std::vector<ConvergenceReport>& reports, const std::string& metadata_json) {
  json doc;
  doc["reports"] = json::array();
  for (const auto& report : reports) {
    json r;
    r["problem"] = report.problem;
    r["method"] = report.method;
    r["fitted_order"] = number_or_null(report.fitted_order);
    r["pairwise_slopes"] = report.pairwise_slopes;
    r["roundoff_floor"] = report.roundoff_floor;
    r["dimension"] = report.dimension;
    r["parameters"] = report.parameters;
    r["rows"] = json::array();
    for (const auto& row : report.rows) {
      r["rows"].push_back({{"k", row.k},
                           {"h", row.h},
                           {"steps", row.steps},
                           {"global_error", number_or_null(row.global_error)},
                           {"wall_time_total_s", row.wall_time_total},
                           {"wall_time_cache_s", row.wall_time_cache},
                           {"diverged", row.diverged},
                           {"at_roundoff_floor", row.at_roundoff_floor}});
    }
    doc["reports"].push_back(std::move(r));
  }
  doc["metadata"] = metadata_json.empty() ? json::object() : json::parse(metadata_json);
  return doc.dump(2);
}

std::vector<ConvergenceReport> reports_from_json(const std::string& text) {
  std::vector<ConvergenceReport> out;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("report JSON: ") + e.what());
  }
  for (const auto& r : doc.at("reports")) {
    ConvergenceReport report;
    report.problem = r.at("problem").get<std::string>();
    report.method = r.at("method").get<std::string>();
    report.fitted_order = number_from(r.at("fitted_order"), std::numeric_limits<double>::quiet_NaN());
    report.pairwise_slopes = r.at("pairwise_slopes").get<std::vector<double>>();
    report.roundoff_floor = r.at("roundoff_floor").get<double>();
    report.dimension = r.at("dimension").get<std::size_t>();
    report.parameters = r.at("parameters").get<std::map<std::string, double>>();
    for (const auto& row : r.at("rows")) {
      ConvergenceRow c;
      c.k = row.at("k").get<int>();
      c.h = row.at("h").get<double>();
      c.steps = row.at("steps").get<std::size_t>();
      c.global_error = number_from(row.at("global_error"), std::numeric_limits<double>::infinity());
      c.wall_time_total = row.at("wall_time_total_s").get<double>();
      c.wall_time_cache = row.at("wall_time_cache_s").get<double>();
      c.diverged = row.at("diverged").get<bool>();
      c.at_roundoff_floor = row.at("at_roundoff_floor").get<bool>();
      report.rows.push_back(c);
    }
    out.push_back(std::move(report));
  }
  return out;
}

}  // namespace expint
