#include "expint_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>
#include <set>
#include <sstream>

#include "expint/problems.hpp"
#include "expint/report_io.hpp"
#include "json.hpp"

namespace expint::cli {

using nlohmann::json;

TimingMode parse_timing(const std::string& text) {
  if (text == "sequential") return TimingMode::sequential;
  if (text == "parallel") return TimingMode::parallel;
  throw ConfigError("unknown timing mode '" + text + "' (expected sequential or parallel)");
}

std::string to_string(TimingMode mode) { return mode == TimingMode::sequential ? "sequential" : "parallel"; }

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"scalar-linear", "scalar-quadratic", "wind", "allen-cahn", "nls"};
  return names;
}

ProblemDefaults problem_defaults(const std::string& problem) {
  if (problem == "scalar-linear" || problem == "scalar-quadratic") return {4, 8, 1.0};
  if (problem == "wind") return {4, 8, 10.0};
  if (problem == "allen-cahn") return {9, 13, 10.0};
  if (problem == "nls") return {3, 7, 10.0};
  throw ConfigError("unknown problem '" + problem + "'");
}

namespace {

enum class Kind { real, integer, grid };

const std::map<std::string, Kind>& parameter_kinds(const std::string& problem) {
  static const std::map<std::string, std::map<std::string, Kind>> table = {
      {"scalar-linear", {{"lambda", Kind::real}, {"y0", Kind::real}}},
      {"scalar-quadratic", {{"lambda", Kind::real}, {"y0", Kind::real}}},
      {"wind", {{"theta", Kind::real}, {"r", Kind::real}, {"x1_0", Kind::real}, {"x2_0", Kind::real}}},
      {"allen-cahn", {{"epsilon", Kind::real}, {"n", Kind::integer}, {"grid", Kind::grid}}},
      {"nls", {{"n", Kind::integer}}},
  };
  const auto it = table.find(problem);
  if (it == table.end()) throw ConfigError("unknown problem '" + problem + "'");
  return it->second;
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("parameter '" + key + "': '" + text + "' is not a finite number");
}

int parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used == text.size() && v >= 0 && v <= 100000) return static_cast<int>(v);
  } catch (const std::exception&) {
  }
  throw ConfigError("parameter '" + key + "': '" + text + "' is not a non-negative integer");
}

AllenCahnGrid parse_grid(const std::string& text) {
  if (text == "chebyshev") return AllenCahnGrid::chebyshev;
  if (text == "uniform") return AllenCahnGrid::uniform;
  throw ConfigError("parameter 'grid': '" + text + "' (expected chebyshev or uniform)");
}

double real_or(const RunConfig& c, const std::string& key, double fallback) {
  const auto it = c.overrides.find(key);
  return it == c.overrides.end() ? fallback : parse_real(key, it->second);
}

int int_or(const RunConfig& c, const std::string& key, int fallback) {
  const auto it = c.overrides.find(key);
  return it == c.overrides.end() ? fallback : parse_int(key, it->second);
}

bool uses_custom_tableau(const std::string& method) {
  return needs_custom_tableau(parse_method(method));
}

}  // namespace

std::pair<int, int> parse_k_range(const std::string& text) {
  const auto dots = text.find("..");
  auto bad = [&] { return ConfigError("bad k range '" + text + "' (expected A..B)"); };
  if (dots == std::string::npos) throw bad();
  try {
    std::size_t used_a = 0, used_b = 0;
    const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    const int lo = std::stoi(a, &used_a);
    const int hi = std::stoi(b, &used_b);
    if (used_a != a.size() || used_b != b.size()) throw bad();
    return {lo, hi};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw bad();
  }
}

RunConfig resolve(RunConfig c) {
  const ProblemDefaults d = problem_defaults(c.problem);
  const auto& kinds = parameter_kinds(c.problem);
  for (const auto& [key, value] : c.overrides) {
    const auto it = kinds.find(key);
    if (it == kinds.end()) throw ConfigError("problem '" + c.problem + "' has no parameter '" + key + "'");
    switch (it->second) {
      case Kind::real: parse_real(key, value); break;
      case Kind::integer: parse_int(key, value); break;
      case Kind::grid: parse_grid(value); break;
    }
  }
  if (!c.k_min) c.k_min = d.k_min;
  if (!c.k_max) c.k_max = d.k_max;
  if (*c.k_min > *c.k_max) throw ConfigError("k range is empty: " + std::to_string(*c.k_min) + ".." +
                                             std::to_string(*c.k_max));
  if (*c.k_min < 0 || *c.k_max > 40) throw ConfigError("k must lie in 0..40");
  if (!c.t_end) c.t_end = d.t_end;
  if (!std::isfinite(*c.t_end) || *c.t_end <= 0.0) throw ConfigError("t-end must be positive");
  if (c.ref_factor < kMinReferenceRefinement)
    throw ConfigError("ref-factor must be at least " + std::to_string(kMinReferenceRefinement));
  if (c.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (c.methods.empty()) throw ConfigError("no methods given");

  std::set<std::string> seen;
  bool wants_tableau = false;
  for (const auto& m : c.methods) {
    parse_method(m);
    if (!seen.insert(m).second) throw ConfigError("method '" + m + "' listed twice");
    wants_tableau = wants_tableau || uses_custom_tableau(m);
  }
  if (wants_tableau && c.tableau_path.empty()) throw ConfigError("mverk4/sverk4 need --tableau FILE");
  if (!wants_tableau && !c.tableau_path.empty())
    throw ConfigError("--tableau given but no mverk4/sverk4 method selected");
  if (c.out.empty()) c.out = c.problem;
  return c;
}

Problem<double> build_problem(const RunConfig& c) {
  const double t_end = c.t_end.value_or(problem_defaults(c.problem).t_end);
  if (c.problem == "scalar-linear" || c.problem == "scalar-quadratic") {
    const auto kind = c.problem == "scalar-linear" ? ToyKind::linear : ToyKind::quadratic;
    const double y0 = real_or(c, "y0", kind == ToyKind::linear ? 1.0 : 0.5);
    return scalar_toy<double>(real_or(c, "lambda", 1.0), kind, y0, t_end);
  }
  if (c.problem == "wind") {
    State y0(2);
    y0 << real_or(c, "x1_0", 1.0), real_or(c, "x2_0", 0.0);
    return wind_oscillation(real_or(c, "theta", std::numbers::pi / 2), real_or(c, "r", 20.0), y0, t_end);
  }
  if (c.problem == "allen-cahn") {
    const auto grid_it = c.overrides.find("grid");
    const auto grid = grid_it == c.overrides.end() ? AllenCahnGrid::chebyshev : parse_grid(grid_it->second);
    return allen_cahn(real_or(c, "epsilon", 0.01), int_or(c, "n", 32), grid, t_end);
  }
  if (c.problem == "nls") return nls_pseudospectral(int_or(c, "n", 16), t_end);
  throw ConfigError("unknown problem '" + c.problem + "'");
}

std::string config_json(const RunConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["overrides"] = c.overrides;
  j["methods"] = c.methods;
  j["k_min"] = c.k_min ? json(*c.k_min) : json(nullptr);
  j["k_max"] = c.k_max ? json(*c.k_max) : json(nullptr);
  j["t_end"] = c.t_end ? json(*c.t_end) : json(nullptr);
  j["ref_factor"] = c.ref_factor;
  j["out"] = c.out;
  j["timing"] = to_string(c.timing);
  j["repetitions"] = c.repetitions;
  j["tableau"] = c.tableau_path.empty() ? json(nullptr) : json(c.tableau_path);
  return j.dump();
}

std::string format_summary(const std::vector<ConvergenceReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %8s %12s %12s  %s\n", "method", "order", "max GE", "min GE", "note");
  out << line;
  for (const auto& r : reports) {
    double lo = INFINITY, hi = 0.0;
    std::string diverged;
    for (const auto& row : r.rows) {
      if (row.diverged) {
        diverged += (diverged.empty() ? "" : ",") + std::to_string(row.k);
        continue;
      }
      lo = std::min(lo, row.global_error);
      hi = std::max(hi, row.global_error);
    }
    std::string note;
    if (r.all_at_roundoff_floor()) note = "exact (all rows at roundoff floor)";
    if (!diverged.empty()) note += (note.empty() ? "" : "; ") + std::string("diverged at k=") + diverged;
    std::snprintf(line, sizeof line, "%-16s %8.3f %12.4e %12.4e  %s\n", r.method.c_str(), r.fitted_order, hi, lo,
                  note.c_str());
    out << line;
  }
  return out.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DivergenceError*>(&e)) return 3;
  if (dynamic_cast<const UnreliableReferenceError*>(&e)) return 4;
  if (dynamic_cast<const Error*>(&e)) return 2;
  return 1;
}

std::string error_json(const std::exception& e) {
  std::string kind = "internal";
  if (dynamic_cast<const DivergenceError*>(&e))
    kind = "divergence";
  else if (dynamic_cast<const UnreliableReferenceError*>(&e))
    kind = "unreliable-reference";
  else if (dynamic_cast<const Error*>(&e))
    kind = "config";
  return json{{"error", kind}, {"message", e.what()}, {"exit_code", exit_code_for(e)}}.dump();
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  file << content;
  file.close();
  if (!file) throw ConfigError("cannot write '" + path + "'");
}

}  // namespace

RunOutput execute(const RunConfig& config) {
  const RunConfig c = resolve(config);
  const Problem<double> p = build_problem(c);

  std::optional<Tableau> custom;
  std::string custom_json;
  if (!c.tableau_path.empty()) {
    custom = load_tableau(c.tableau_path);
    custom_json = tableau_to_json(*custom);
  }

  // Probe output paths before spending time on the studies.
  RunOutput out;
  out.csv_path = c.out + ".csv";
  out.json_path = c.out + ".json";
  for (const auto& path : {out.csv_path, out.json_path}) {
    std::ofstream probe(path, std::ios::app);
    if (!probe) throw ConfigError("cannot write '" + path + "'");
  }

  out.reference = reference_solution(p, std::ldexp(1.0, -*c.k_max), c.ref_factor);

  std::vector<Method<double>> methods;
  for (const auto& name : c.methods)
    methods.push_back(make_method(name, uses_custom_tableau(name) ? custom : std::nullopt));

  StudyOptions options;
  options.refinement = c.ref_factor;
  options.repetitions = c.repetitions;
  auto study = [&](const Method<double>& m) {
    return convergence_study(p, m, *c.k_min, *c.k_max, out.reference, options);
  };
  if (c.timing == TimingMode::parallel) {
    std::vector<std::future<ConvergenceReport>> futures;
    for (const auto& m : methods) futures.push_back(std::async(std::launch::async, study, std::cref(m)));
    for (auto& f : futures) out.reports.push_back(f.get());
  } else {
    for (const auto& m : methods) out.reports.push_back(study(m));
  }

  for (const auto& r : out.reports) {
    const bool any_finite =
        std::any_of(r.rows.begin(), r.rows.end(), [](const ConvergenceRow& row) { return !row.diverged; });
    if (!any_finite) throw DivergenceError(r.method + " diverged at every stepsize on " + r.problem);
  }

  std::ostringstream csv;
  write_csv(csv, out.reports);
  write_file(out.csv_path, csv.str());

  json meta;
  meta["config"] = json::parse(config_json(c));
  meta["problem"] = {{"label", p.label},
                     {"dimension", p.dim()},
                     {"t0", p.t0},
                     {"t_end", p.t_end},
                     {"parameters", p.parameters}};
  meta["reference"] = {{"method", "mverk41"},
                       {"cross_check_method", "erk-krogstad4"},
                       {"h_ref", out.reference.h_ref},
                       {"steps", out.reference.steps},
                       {"cross_check", out.reference.cross_check}};
  if (custom) meta["custom_tableau"] = {{"path", c.tableau_path}, {"coefficients", json::parse(custom_json)}};
  json efficiency = json::array();
  for (const auto& row : efficiency_table(out.reports))
    efficiency.push_back({{"method", row.method},
                          {"k", row.k},
                          {"h", row.h},
                          {"global_error", std::isfinite(row.global_error) ? json(row.global_error) : json()},
                          {"cpu_time_s", row.cpu_time},
                          {"cache_time_s", row.cache_time},
                          {"step_time_per_step_s", row.step_time_per_step}});
  meta["efficiency"] = std::move(efficiency);
  write_file(out.json_path, reports_to_json(out.reports, meta.dump()));
  return out;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const RunOutput result = execute(config);
    out << format_summary(result.reports);
    out << "wrote " << result.csv_path << " and " << result.json_path << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return exit_code_for(e);
  }
}

int check_tableau(const std::string& path, std::ostream& out, std::ostream& err) {
  static const char* labels[8] = {"sum b = 1",         "b.c = 1/2",        "b.c^2 = 1/3",
                                  "b.A.c = 1/6",       "b.c^3 = 1/4",      "(b*c).A.c = 1/8",
                                  "b.A.c^2 = 1/12",    "b4 a43 a32 c2 = 1/24"};
  try {
    const Tableau t = load_tableau(path);
    const OrderConditionReport report = check_order4(t);
    char line[128];
    for (std::size_t i = 0; i < 8; ++i) {
      std::snprintf(line, sizeof line, "%zu  %-22s % .3e\n", i + 1, labels[i], report.residuals[i]);
      out << line;
    }
    std::snprintf(line, sizeof line, "max |residual| = %.3e (tolerance %.0e)\n", report.max_abs_residual(),
                  kOrderConditionTolerance);
    out << line << (report.satisfied ? "PASS" : "FAIL") << '\n';
    return report.satisfied ? 0 : 1;
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return exit_code_for(e);
  }
}

}  // namespace expint::cli
