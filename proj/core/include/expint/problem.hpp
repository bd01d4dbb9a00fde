#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "expint/linalg.hpp"

namespace expint {

/// y' + M y = f(y), y(t0) = y0 on [t0, t_end].
///
/// jvp(y, v) = f'(y) v and hvp(y, u, v) = f''(y)(u, v) are supplied by the
/// caller; the modified and simplified exponential methods need both.
template <class Real>
struct Problem {
  using Vec = Vector<Real>;
  using Rhs = std::function<Vec(const Vec&)>;
  using Jvp = std::function<Vec(const Vec&, const Vec&)>;
  using Hvp = std::function<Vec(const Vec&, const Vec&, const Vec&)>;

  std::string label;
  Matrix<Real> m;
  Rhs f;
  Jvp jvp;
  Hvp hvp;
  Vec y0;
  Real t0 = Real(0);
  Real t_end = Real(1);
  /// Echoed into report metadata.
  std::map<std::string, double> parameters;
  /// Set when jvp/hvp are finite-difference stand-ins.
  bool derivatives_approximate = false;

  Eigen::Index dim() const noexcept { return y0.size(); }
  bool has_jvp() const noexcept { return static_cast<bool>(jvp); }
  bool has_hvp() const noexcept { return static_cast<bool>(hvp); }

  /// g(y) = -M y + f(y)
  Vec rhs(const Vec& y) const { return f(y) - m * y; }
};

/// Replaces missing jvp/hvp with central differences of f. The jvp step is
/// cbrt(eps) * max(1, |y|); the hvp uses eps^(1/4). The result is flagged
/// through derivatives_approximate because the h^4 correction terms lose
/// accuracy accordingly.
template <class Real>
Problem<Real> with_finite_difference_derivatives(Problem<Real> p) {
  using Vec = Vector<Real>;
  using std::cbrt;
  using std::sqrt;
  const Real eps = std::numeric_limits<Real>::epsilon();
  auto f = p.f;
  if (!p.jvp) {
    p.jvp = [f, eps](const Vec& y, const Vec& v) -> Vec {
      const Real vn = max_norm(v);
      if (vn == Real(0)) return Vec::Zero(y.size());
      const Real step = cbrt(eps) * std::max(Real(1), max_norm(y)) / vn;
      return (f(y + step * v) - f(y - step * v)) / (Real(2) * step);
    };
  }
  if (!p.hvp) {
    p.hvp = [f, eps](const Vec& y, const Vec& u, const Vec& v) -> Vec {
      const Real un = max_norm(u), vn = max_norm(v);
      if (un == Real(0) || vn == Real(0)) return Vec::Zero(y.size());
      const Real base = sqrt(sqrt(eps)) * std::max(Real(1), max_norm(y));
      const Real su = base / un, sv = base / vn;
      const Vec pp = f(y + su * u + sv * v);
      const Vec pm = f(y + su * u - sv * v);
      const Vec mp = f(y - su * u + sv * v);
      const Vec mm = f(y - su * u - sv * v);
      return (pp - pm - mp + mm) / (Real(4) * su * sv);
    };
  }
  p.derivatives_approximate = true;
  return p;
}

enum class ToyKind { linear, quadratic };

/// Scalar test problems with closed-form solutions:
///   linear:    y' = -lambda y
///   quadratic: y' = -lambda y + y^2
template <class Real>
Problem<Real> scalar_toy(Real lambda, ToyKind kind, Real y0 = Real(1), Real t_end = Real(1)) {
  using Vec = Vector<Real>;
  Problem<Real> p;
  p.label = kind == ToyKind::linear ? "scalar-linear" : "scalar-quadratic";
  p.m = Matrix<Real>::Constant(1, 1, lambda);
  p.y0 = Vec::Constant(1, y0);
  p.t0 = Real(0);
  p.t_end = t_end;
  if (kind == ToyKind::linear) {
    p.f = [](const Vec& y) -> Vec { return Vec::Zero(y.size()); };
    p.jvp = [](const Vec& y, const Vec&) -> Vec { return Vec::Zero(y.size()); };
    p.hvp = [](const Vec& y, const Vec&, const Vec&) -> Vec { return Vec::Zero(y.size()); };
  } else {
    p.f = [](const Vec& y) -> Vec { return y.cwiseProduct(y); };
    p.jvp = [](const Vec& y, const Vec& v) -> Vec { return Real(2) * y.cwiseProduct(v); };
    p.hvp = [](const Vec&, const Vec& u, const Vec& v) -> Vec { return Real(2) * u.cwiseProduct(v); };
  }
  p.parameters["lambda"] = static_cast<double>(lambda);
  p.parameters["y0"] = static_cast<double>(y0);
  return p;
}

/// Closed-form solution of scalar_toy at time t.
template <class Real>
Real scalar_toy_exact(Real lambda, ToyKind kind, Real y0, Real t) {
  using std::exp;
  if (kind == ToyKind::linear) return y0 * exp(-lambda * t);
  // Bernoulli: u = 1/y solves u' = lambda u - 1.
  if (lambda == Real(0)) return y0 / (Real(1) - y0 * t);
  const Real u = (Real(1) / y0 - Real(1) / lambda) * exp(lambda * t) + Real(1) / lambda;
  return Real(1) / u;
}

}  // namespace expint
