#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expint/integrators.hpp"

namespace expint {

inline constexpr double kReferenceAgreement = 1e-9;
inline constexpr int kMinReferenceRefinement = 32;

struct ReferenceSolution {
  State state;
  double h_ref = 0.0;
  /// max-norm difference of the two reference integrations relative to |state|.
  double cross_check = 0.0;
  std::size_t steps = 0;
};

/// Fine-step reference: mverk41 at h_min / refinement, cross-checked against
/// erk-krogstad4 on the same grid. Throws UnreliableReferenceError when the
/// two disagree by more than kReferenceAgreement (relative, max norm).
ReferenceSolution reference_solution(const Problem<double>& p, double h_min, int refinement = kMinReferenceRefinement);

/// ||y_num - y_ref||_inf
double global_error(const State& y_num, const State& y_ref);

struct ConvergenceRow {
  int k = 0;
  double h = 0.0;
  std::size_t steps = 0;
  double global_error = 0.0;
  double wall_time_total = 0.0;
  double wall_time_cache = 0.0;
  bool diverged = false;
  /// The measured error fell below the roundoff floor and was clamped to it.
  bool at_roundoff_floor = false;

  bool operator==(const ConvergenceRow&) const = default;
};

struct ConvergenceReport {
  std::string problem;
  std::string method;
  /// Sorted by decreasing h.
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(error) against log(h) over rows above the floor.
  double fitted_order = std::numeric_limits<double>::quiet_NaN();
  /// log2(e_i / e_{i+1}) / log2(h_i / h_{i+1}) for consecutive usable rows.
  std::vector<double> pairwise_slopes;
  double roundoff_floor = 0.0;
  std::size_t dimension = 0;
  std::map<std::string, double> parameters;

  /// Every usable row sits at the floor (method exact for this problem).
  bool all_at_roundoff_floor() const;
};

struct StudyOptions {
  int refinement = kMinReferenceRefinement;
  /// Timing repetitions per (method, h), interleaved across the grid; the median is reported.
  int repetitions = 3;
  /// Custom coefficients for mverk4/sverk4.
  std::optional<Tableau> tableau;
};

/// 100 * unit roundoff * max(1, |y_ref|_inf)
double roundoff_floor(const State& y_ref);

/// Floor for errors measured against a fine-step reference: the larger of
/// roundoff_floor(state) and the rounding the reference accumulates over its
/// own steps, unit roundoff * steps * max(1, |state|_inf).
double roundoff_floor(const ReferenceSolution& reference);

/// Least-squares slope of log(error) on log(h) for usable rows; NaN with fewer than two.
double fit_order(const std::vector<ConvergenceRow>& rows);

/// Runs h = 2^-k for k in [k_min, k_max] against a precomputed reference.
ConvergenceReport convergence_study(const Problem<double>& p, const Method<double>& method, int k_min, int k_max,
                                    const ReferenceSolution& reference, const StudyOptions& options = {});

/// Same, computing the reference at h = 2^-k_max / options.refinement.
ConvergenceReport convergence_study(const Problem<double>& p, const Method<double>& method, int k_min, int k_max,
                                    const StudyOptions& options = {});

struct EfficiencyRow {
  std::string method;
  int k = 0;
  double h = 0.0;
  double global_error = 0.0;
  double cpu_time = 0.0;
  double cache_time = 0.0;
  /// Step-loop time per step, cache construction excluded.
  double step_time_per_step = 0.0;

  bool operator==(const EfficiencyRow&) const = default;
};

/// Rows for GE-vs-CPU plots, ordered by (method, decreasing h). All reports
/// must share a problem.
std::vector<EfficiencyRow> efficiency_table(const std::vector<ConvergenceReport>& reports);

}  // namespace expint
