#include <iostream>

#include "CLI11.hpp"
#include "expint_cli/cli.hpp"

int main(int argc, char** argv) {
  namespace ec = expint::cli;
  CLI::App app{"Fixed-step exponential integrators: convergence studies and tableau checks"};
  app.require_subcommand(1);

  ec::RunConfig config;
  std::string k_range, timing = "sequential";
  std::vector<std::string> sets, methods;
  double t_end = 0.0;

  auto* run = app.add_subcommand("run", "Run convergence studies and write <out>.csv / <out>.json");
  run->add_option("--problem", config.problem, "scalar-linear | scalar-quadratic | wind | allen-cahn | nls")
      ->capture_default_str();
  run->add_option("--methods", methods, "Comma-separated method list (default mverk41,mverk42,sverk41,sverk42)")
      ->delimiter(',');
  run->add_option("--k", k_range, "Stepsize exponents A..B, h = 2^-k (default per problem)");
  auto* t_end_opt = run->add_option("--t-end", t_end, "Final time (default per problem)");
  run->add_option("--ref-factor", config.ref_factor, "Reference refinement below the finest h")->capture_default_str();
  run->add_option("--out", config.out, "Output prefix (default: problem name)");
  run->add_option("--timing", timing, "sequential | parallel")->capture_default_str();
  run->add_option("--tableau", config.tableau_path, "JSON coefficients for mverk4 / sverk4");
  run->add_option("--set", sets, "Problem parameter override key=value (repeatable)");
  run->add_option("--repetitions", config.repetitions, "Timing repetitions per stepsize")->capture_default_str();

  std::string tableau_file;
  auto* check = app.add_subcommand("check-tableau", "Print the eight order-condition residuals of a tableau");
  check->add_option("file", tableau_file, "Tableau JSON {\"s\":4,\"A\":[[...]],\"b\":[...],\"c\":[...]}")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*check) return ec::check_tableau(tableau_file, std::cout, std::cerr);

  try {
    if (!methods.empty()) config.methods = methods;
    if (!k_range.empty()) std::tie(config.k_min, config.k_max) = ec::parse_k_range(k_range);
    if (*t_end_opt) config.t_end = t_end;
    config.timing = ec::parse_timing(timing);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw expint::ConfigError("--set expects key=value, got '" + s + "'");
      config.overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
  } catch (const std::exception& e) {
    std::cerr << ec::error_json(e) << '\n';
    return ec::exit_code_for(e);
  }
  return ec::run(config, std::cout, std::cerr);
}
