#include "expint/harness.hpp"

#include <algorithm>
#include <cmath>

namespace expint {

double global_error(const State& y_num, const State& y_ref) {
  if (y_num.size() != y_ref.size())
    throw DimensionError("global_error: states of length " + std::to_string(y_num.size()) + " and " +
                         std::to_string(y_ref.size()));
  double e = 0.0;
  for (Eigen::Index i = 0; i < y_num.size(); ++i) e = std::max(e, std::abs(y_num(i) - y_ref(i)));
  return e;
}

double roundoff_floor(const State& y_ref) {
  return 100.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, max_norm(y_ref));
}

double roundoff_floor(const ReferenceSolution& reference) {
  const double steps = std::max(100.0, static_cast<double>(reference.steps));
  return steps * std::numeric_limits<double>::epsilon() * std::max(1.0, max_norm(reference.state));
}

ReferenceSolution reference_solution(const Problem<double>& p, double h_min, int refinement) {
  if (refinement < kMinReferenceRefinement)
    throw ConfigError("reference refinement must be at least " + std::to_string(kMinReferenceRefinement));
  const double h_ref = h_min / refinement;
  const auto primary = integrate(make_method<double>(MethodId::mverk41), p, h_ref, p.t_end);
  const auto secondary = integrate(make_method<double>(MethodId::erk_krogstad4), p, h_ref, p.t_end);

  ReferenceSolution ref;
  ref.state = primary.final_state;
  ref.h_ref = h_ref;
  ref.steps = primary.steps;
  ref.cross_check = global_error(primary.final_state, secondary.final_state) /
                    std::max(max_norm(primary.final_state), std::numeric_limits<double>::min());
  if (!(ref.cross_check <= kReferenceAgreement))
    throw UnreliableReferenceError("reference for '" + p.label + "' at h = " + std::to_string(h_ref) +
                                   ": mverk41 and erk-krogstad4 differ by " + std::to_string(ref.cross_check) +
                                   " (relative)");
  return ref;
}

bool ConvergenceReport::all_at_roundoff_floor() const {
  bool any = false;
  for (const auto& row : rows) {
    if (row.diverged) continue;
    if (!row.at_roundoff_floor) return false;
    any = true;
  }
  return any;
}

namespace {

bool usable(const ConvergenceRow& row) {
  return !row.diverged && !row.at_roundoff_floor && std::isfinite(row.global_error) && row.global_error > 0.0;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> pairwise(const std::vector<ConvergenceRow>& rows) {
  std::vector<double> out;
  const ConvergenceRow* prev = nullptr;
  for (const auto& row : rows) {
    if (!usable(row)) {
      prev = nullptr;
      continue;
    }
    if (prev) out.push_back(std::log(prev->global_error / row.global_error) / std::log(prev->h / row.h));
    prev = &row;
  }
  return out;
}

}  // namespace

double fit_order(const std::vector<ConvergenceRow>& rows) {
  std::vector<double> xs, ys;
  for (const auto& row : rows) {
    if (!usable(row)) continue;
    xs.push_back(std::log(row.h));
    ys.push_back(std::log(row.global_error));
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

ConvergenceReport convergence_study(const Problem<double>& p, const Method<double>& method, int k_min, int k_max,
                                    const ReferenceSolution& reference, const StudyOptions& options) {
  if (k_min > k_max) throw ConfigError("empty k range");
  if (options.repetitions < 1) throw ConfigError("repetitions must be positive");
  if (reference.state.size() != p.dim()) throw DimensionError("reference state does not match the problem");

  ConvergenceReport report;
  report.problem = p.label;
  report.method = method.name();
  report.dimension = static_cast<std::size_t>(p.dim());
  report.parameters = p.parameters;
  report.roundoff_floor = roundoff_floor(reference);

  const auto n_rows = static_cast<std::size_t>(k_max - k_min + 1);
  report.rows.resize(n_rows);
  std::vector<std::vector<double>> totals(n_rows), caches(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    ConvergenceRow& row = report.rows[i];
    row.k = k_min + static_cast<int>(i);
    row.h = std::ldexp(1.0, -row.k);
    row.steps = step_count(p.t0, p.t_end, row.h);
  }
  // Repetitions are interleaved across the grid.
  for (int rep = 0; rep < options.repetitions; ++rep) {
    for (std::size_t i = 0; i < n_rows; ++i) {
      ConvergenceRow& row = report.rows[i];
      if (row.diverged) continue;
      try {
        const auto run = integrate(method, p, row.h, p.t_end);
        totals[i].push_back(run.wall_time_total());
        caches[i].push_back(run.wall_time_cache);
        if (rep == 0) row.global_error = global_error(run.final_state, reference.state);
        if (!std::isfinite(row.global_error)) row.diverged = true;
      } catch (const DivergenceError&) {
        // Blow-up at coarse h is data, not a failure.
        row.diverged = true;
      }
    }
  }
  for (std::size_t i = 0; i < n_rows; ++i) {
    ConvergenceRow& row = report.rows[i];
    if (!totals[i].empty()) {
      row.wall_time_total = median(totals[i]);
      row.wall_time_cache = median(caches[i]);
    }
    if (row.diverged) {
      row.global_error = std::numeric_limits<double>::infinity();
    } else if (row.global_error <= report.roundoff_floor) {
      row.at_roundoff_floor = true;
      row.global_error = report.roundoff_floor;
    }
  }
  report.fitted_order = fit_order(report.rows);
  report.pairwise_slopes = pairwise(report.rows);
  return report;
}

ConvergenceReport convergence_study(const Problem<double>& p, const Method<double>& method, int k_min, int k_max,
                                    const StudyOptions& options) {
  if (k_min > k_max) throw ConfigError("empty k range");
  const auto reference = reference_solution(p, std::ldexp(1.0, -k_max), options.refinement);
  return convergence_study(p, method, k_min, k_max, reference, options);
}

std::vector<EfficiencyRow> efficiency_table(const std::vector<ConvergenceReport>& reports) {
  std::vector<EfficiencyRow> table;
  for (const auto& report : reports) {
    if (report.problem != reports.front().problem)
      throw ConfigError("efficiency_table: reports mix problems '" + reports.front().problem + "' and '" +
                        report.problem + "'");
    for (const auto& row : report.rows) {
      EfficiencyRow e;
      e.method = report.method;
      e.k = row.k;
      e.h = row.h;
      e.global_error = row.global_error;
      e.cpu_time = row.wall_time_total;
      e.cache_time = row.wall_time_cache;
      e.step_time_per_step =
          row.steps > 0 ? (row.wall_time_total - row.wall_time_cache) / static_cast<double>(row.steps) : 0.0;
      table.push_back(std::move(e));
    }
  }
  std::stable_sort(table.begin(), table.end(), [](const EfficiencyRow& a, const EfficiencyRow& b) {
    if (a.method != b.method) return a.method < b.method;
    return a.h > b.h;
  });
  return table;
}

}  // namespace expint
