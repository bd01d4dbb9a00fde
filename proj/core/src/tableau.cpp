#include "expint/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace expint {

BuiltinTableau parse_builtin_tableau(std::string_view name) {
  if (name == "classical-rk4") return BuiltinTableau::classical_rk4;
  if (name == "three-eighths") return BuiltinTableau::three_eighths;
  throw LookupError("unknown tableau '" + std::string(name) + "' (expected classical-rk4 or three-eighths)");
}

std::string_view to_string(BuiltinTableau which) {
  switch (which) {
    case BuiltinTableau::classical_rk4: return "classical-rk4";
    case BuiltinTableau::three_eighths: return "three-eighths";
  }
  return "?";
}

Tableau builtin(std::string_view name) { return builtin_tableau<double>(parse_builtin_tableau(name)); }

double OrderConditionReport::max_abs_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, std::abs(r));
  return m;
}

namespace {

double ordered_sum(std::vector<double> terms, bool ascending) {
  std::stable_sort(terms.begin(), terms.end(), [ascending](double x, double y) {
    return ascending ? std::abs(x) < std::abs(y) : std::abs(x) > std::abs(y);
  });
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

OrderConditionReport check_order4(const Tableau& t) { return check_order4(t, true); }

OrderConditionReport check_order4(const Tableau& t, bool ascending_magnitude) {
  if (t.stages() != 4)
    throw UnsupportedError("check_order4: tableau has " + std::to_string(t.stages()) +
                           " stages; only the four-stage conditions are implemented");
  const auto& a = t.a();
  const auto& b = t.b();
  const auto& c = t.c();

  std::array<std::vector<double>, 8> lhs;
  for (int i = 0; i < 4; ++i) {
    lhs[0].push_back(b(i));
    lhs[1].push_back(b(i) * c(i));
    lhs[2].push_back(b(i) * c(i) * c(i));
    lhs[4].push_back(b(i) * c(i) * c(i) * c(i));
    for (int j = 0; j < i; ++j) {
      lhs[3].push_back(b(i) * a(i, j) * c(j));
      lhs[5].push_back(b(i) * c(i) * a(i, j) * c(j));
      lhs[6].push_back(b(i) * a(i, j) * c(j) * c(j));
    }
  }
  lhs[7].push_back(b(3) * a(3, 2) * a(2, 1) * c(1));

  constexpr std::array<double, 8> rhs = {1.0, 1.0 / 2, 1.0 / 3, 1.0 / 6, 1.0 / 4, 1.0 / 8, 1.0 / 12, 1.0 / 24};
  OrderConditionReport report;
  for (std::size_t k = 0; k < 8; ++k) report.residuals[k] = ordered_sum(lhs[k], ascending_magnitude) - rhs[k];
  report.satisfied = report.max_abs_residual() <= kOrderConditionTolerance;
  return report;
}

namespace {

using nlohmann::json;

std::vector<double> number_list(const json& node, const std::string& field) {
  if (!node.is_array()) throw ConfigError("tableau field '" + field + "' must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number())
      throw ConfigError("tableau field '" + field + "[" + std::to_string(i) + "]' is not a number");
    out.push_back(node[i].get<double>());
  }
  return out;
}

}  // namespace

Tableau tableau_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; translate it to line/column.
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("tableau JSON parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("tableau JSON must be an object");
  for (const char* key : {"s", "A", "b"})
    if (!doc.contains(key)) throw ConfigError(std::string("tableau JSON missing field '") + key + "'");
  if (!doc["s"].is_number_integer()) throw ConfigError("tableau field 's' must be an integer");
  const int s = doc["s"].get<int>();
  if (s <= 0) throw ConfigError("tableau field 's' must be positive");

  const json& rows = doc["A"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != s)
    throw ConfigError("tableau field 'A' must have s = " + std::to_string(s) + " rows");
  DenseMatrix a = DenseMatrix::Zero(s, s);
  for (int i = 0; i < s; ++i) {
    const auto row = number_list(rows[static_cast<std::size_t>(i)], "A[" + std::to_string(i) + "]");
    if (static_cast<int>(row.size()) != s)
      throw ConfigError("tableau field 'A[" + std::to_string(i) + "]' must have " + std::to_string(s) + " entries");
    for (int j = 0; j < s; ++j) a(i, j) = row[static_cast<std::size_t>(j)];
  }
  const auto bs = number_list(doc["b"], "b");
  if (static_cast<int>(bs.size()) != s) throw ConfigError("tableau field 'b' must have s entries");
  State b = Eigen::Map<const State>(bs.data(), s);

  Tableau t(std::move(a), std::move(b));
  if (doc.contains("c")) {
    const auto cs = number_list(doc["c"], "c");
    if (static_cast<int>(cs.size()) != s) throw ConfigError("tableau field 'c' must have s entries");
    for (int i = 0; i < s; ++i)
      if (std::abs(cs[static_cast<std::size_t>(i)] - t.c(i)) > kOrderConditionTolerance)
        throw ConfigError("tableau field 'c[" + std::to_string(i) + "]' does not equal the row sum of A");
  }
  return t;
}

std::string tableau_to_json(const Tableau& t) {
  json doc;
  doc["s"] = t.stages();
  json rows = json::array();
  for (int i = 0; i < t.stages(); ++i) {
    json row = json::array();
    for (int j = 0; j < t.stages(); ++j) row.push_back(t.a(i, j));
    rows.push_back(row);
  }
  doc["A"] = rows;
  doc["b"] = std::vector<double>(t.b().data(), t.b().data() + t.stages());
  doc["c"] = std::vector<double>(t.c().data(), t.c().data() + t.stages());
  return doc.dump(2);
}

Tableau load_tableau(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tableau file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return tableau_from_json(buf.str());
}

}  // namespace expint
