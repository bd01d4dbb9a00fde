#include "expint/method.hpp"

#include <array>
#include <utility>

#include "expint/error.hpp"

namespace expint {

namespace {

constexpr std::array<std::pair<MethodId, std::string_view>, 10> kNames = {{
    {MethodId::mverk41, "mverk41"},
    {MethodId::mverk42, "mverk42"},
    {MethodId::sverk41, "sverk41"},
    {MethodId::sverk42, "sverk42"},
    {MethodId::rk4, "rk4"},
    {MethodId::rk4_38, "rk4-38"},
    {MethodId::erk_hochbruck5, "erk-hochbruck5"},
    {MethodId::erk_krogstad4, "erk-krogstad4"},
    {MethodId::mverk4, "mverk4"},
    {MethodId::sverk4, "sverk4"},
}};

}  // namespace

MethodId parse_method(std::string_view name) {
  for (const auto& [id, text] : kNames)
    if (text == name) return id;
  throw LookupError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(MethodId id) {
  for (const auto& [key, text] : kNames)
    if (key == id) return text;
  return "?";
}

Family family_of(MethodId id) {
  switch (id) {
    case MethodId::mverk41:
    case MethodId::mverk42:
    case MethodId::mverk4: return Family::mverk;
    case MethodId::sverk41:
    case MethodId::sverk42:
    case MethodId::sverk4: return Family::sverk;
    case MethodId::rk4:
    case MethodId::rk4_38: return Family::rk;
    case MethodId::erk_hochbruck5: return Family::erk_hochbruck5;
    case MethodId::erk_krogstad4: return Family::erk_krogstad4;
  }
  return Family::rk;
}

std::optional<BuiltinTableau> builtin_tableau_of(MethodId id) {
  switch (id) {
    case MethodId::mverk41:
    case MethodId::sverk41:
    case MethodId::rk4: return BuiltinTableau::classical_rk4;
    case MethodId::mverk42:
    case MethodId::sverk42:
    case MethodId::rk4_38: return BuiltinTableau::three_eighths;
    default: return std::nullopt;
  }
}

bool needs_custom_tableau(MethodId id) { return id == MethodId::mverk4 || id == MethodId::sverk4; }

bool is_exponential(MethodId id) { return family_of(id) != Family::rk; }

bool needs_derivatives(MethodId id) {
  const Family f = family_of(id);
  return f == Family::mverk || f == Family::sverk;
}

const std::vector<MethodId>& all_builtin_methods() {
  static const std::vector<MethodId> ids = {MethodId::mverk41, MethodId::mverk42,        MethodId::sverk41,
                                            MethodId::sverk42, MethodId::rk4,            MethodId::rk4_38,
                                            MethodId::erk_hochbruck5, MethodId::erk_krogstad4};
  return ids;
}

}  // namespace expint
