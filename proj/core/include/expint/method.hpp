#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expint/tableau.hpp"

namespace expint {

/// Stable method identifiers. mverk4/sverk4 are the generic four-stage
/// families and need a user tableau.
enum class MethodId {
  mverk41,
  mverk42,
  sverk41,
  sverk42,
  rk4,
  rk4_38,
  erk_hochbruck5,
  erk_krogstad4,
  mverk4,
  sverk4,
};

enum class Family { mverk, sverk, rk, erk_hochbruck5, erk_krogstad4 };

MethodId parse_method(std::string_view name);
std::string_view to_string(MethodId id);
Family family_of(MethodId id);
/// Built-in coefficients behind a method, if it has fixed ones.
std::optional<BuiltinTableau> builtin_tableau_of(MethodId id);
bool needs_custom_tableau(MethodId id);
/// Exact on y' = -My (everything except the plain Runge-Kutta baselines).
bool is_exponential(MethodId id);
/// Needs jvp/hvp from the problem.
bool needs_derivatives(MethodId id);

/// The eight fixed methods in a stable order.
const std::vector<MethodId>& all_builtin_methods();

}  // namespace expint
