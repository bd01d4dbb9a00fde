#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "expint/harness.hpp"

namespace expint {

inline constexpr const char* kCsvHeader =
    "problem,method,k,h,steps,global_error,wall_time_total_s,wall_time_cache_s";

/// One CSV line per (method, k); doubles printed with 17 significant digits.
void write_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports);

struct CsvRow {
  std::string problem;
  std::string method;
  ConvergenceRow row;

  bool operator==(const CsvRow&) const = default;
};

/// Inverse of write_csv. Flags that the CSV does not carry (diverged,
/// at_roundoff_floor) are recovered from the error value: inf marks divergence.
std::vector<CsvRow> read_csv(std::istream& in);

/// JSON document {"reports": [...], "metadata": {...}}. The metadata string,
/// when non-empty, must itself be a JSON object (the resolved run config).
std::string reports_to_json(const std::vector<ConvergenceReport>& reports, const std::string& metadata_json = "");
std::vector<ConvergenceReport> reports_from_json(const std::string& text);

}  // namespace expint
