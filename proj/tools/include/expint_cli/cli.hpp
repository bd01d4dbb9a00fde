#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expint/harness.hpp"

namespace expint::cli {

enum class TimingMode { sequential, parallel };

TimingMode parse_timing(const std::string& text);
std::string to_string(TimingMode mode);

struct RunConfig {
  std::string problem = "wind";
  /// --set key=value overrides, checked against the selected problem.
  std::map<std::string, std::string> overrides;
  std::vector<std::string> methods = {"mverk41", "mverk42", "sverk41", "sverk42"};
  std::optional<int> k_min;
  std::optional<int> k_max;
  std::optional<double> t_end;
  int ref_factor = kMinReferenceRefinement;
  /// Prefix for <out>.csv and <out>.json; empty means <problem>.
  std::string out;
  TimingMode timing = TimingMode::sequential;
  std::string tableau_path;
  int repetitions = 3;
};

struct ProblemDefaults {
  int k_min;
  int k_max;
  double t_end;
};

const std::vector<std::string>& problem_names();
ProblemDefaults problem_defaults(const std::string& problem);

/// "A..B" -> (A, B)
std::pair<int, int> parse_k_range(const std::string& text);

/// Fills defaults and validates; throws ConfigError.
RunConfig resolve(RunConfig config);

Problem<double> build_problem(const RunConfig& resolved);

/// Full resolved config as a JSON object.
std::string config_json(const RunConfig& resolved);

std::string format_summary(const std::vector<ConvergenceReport>& reports);

/// Exit code for an exception escaping a run.
int exit_code_for(const std::exception& e);

/// {"error": kind, "message": text, "exit_code": n}
std::string error_json(const std::exception& e);

struct RunOutput {
  std::vector<ConvergenceReport> reports;
  ReferenceSolution reference;
  std::string csv_path;
  std::string json_path;
};

/// Studies every method, writes CSV and JSON. Throws on failure.
RunOutput execute(const RunConfig& config);

/// execute() wrapped with summary printing and exit-code mapping.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Prints the eight residuals and PASS/FAIL; 0 iff satisfied, 2 on a bad file.
int check_tableau(const std::string& path, std::ostream& out, std::ostream& err);

}  // namespace expint::cli
