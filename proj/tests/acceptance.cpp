#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

#include "expint/harness.hpp"
#include "expint/matfun.hpp"
#include "expint/problems.hpp"
#include "oracles.hpp"

using namespace expint;
using Quad = boost::multiprecision::float128;

namespace {

const std::vector<MethodId> kNew = {MethodId::mverk41, MethodId::mverk42, MethodId::sverk41, MethodId::sverk42};
const std::vector<MethodId> kExponential = {MethodId::mverk41, MethodId::mverk42,        MethodId::sverk41,
                                            MethodId::sverk42, MethodId::erk_hochbruck5, MethodId::erk_krogstad4};

struct Outcome {
  bool pass = true;
  std::string detail;
};

char buffer[512];

template <class... Args>
std::string format(const char* fmt, Args... args) {
  std::snprintf(buffer, sizeof buffer, fmt, args...);
  return buffer;
}

template <class Real>
StepResult<Real> one_step(const Method<Real>& method, const Problem<Real>& p, const Vector<Real>& y, Real h) {
  return step(method, CoefficientCache<Real>::build(method, p.m, h), p, y);
}

Problem<double> homogeneous(const DenseMatrix& m, const State& y0, double t_end) {
  Problem<double> p;
  p.label = "homogeneous";
  p.m = m;
  p.f = [](const State& y) -> State { return State::Zero(y.size()); };
  p.jvp = [](const State& y, const State&) -> State { return State::Zero(y.size()); };
  p.hvp = [](const State& y, const State&, const State&) -> State { return State::Zero(y.size()); };
  p.y0 = y0;
  p.t_end = t_end;
  return p;
}

Outcome order_conditions() {
  Outcome o;
  double worst = 0.0;
  for (MethodId id : kNew) {
    const auto report = check_order4(builtin(to_string(*builtin_tableau_of(id))));
    worst = std::max(worst, report.max_abs_residual());
    o.pass = o.pass && report.satisfied && report.max_abs_residual() <= 1e-14;
  }
  o.detail = format("max residual %.2e over the four tableaux", worst);
  return o;
}

Outcome homogeneous_exactness() {
  Outcome o;
  oracle::Rng rng(1001);
  double worst = 0.0;
  for (int sys = 0; sys < 20; ++sys) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(sys % 8);
    const int kind = sys % 3;
    DenseMatrix m;
    if (kind == 0)
      m = oracle::random_symmetric(rng, n, 0.0, 100.0);
    else if (kind == 1)
      m = oracle::random_symmetric(rng, n, -10.0, 0.0);
    else
      m = oracle::random_skew(rng, n, 20.0);
    const int steps = 1 + static_cast<int>(rng() % 64);
    const double h = 1.0 / 64;
    const double t = steps * h;
    const auto p = homogeneous(m, oracle::random_vector(rng, n), t);
    const State exact = kind < 2 ? State(oracle::expm_sym(DenseMatrix(-t * m)) * p.y0)
                                 : State(oracle::expm_eig(DenseMatrix(-t * m)) * p.y0);
    for (MethodId id : kExponential) {
      const double rel = oracle::rel_diff(integrate(make_method<double>(id), p, h, t).final_state, exact);
      worst = std::max(worst, rel / steps);
      o.pass = o.pass && rel <= steps * 1e-12;
    }
  }
  o.detail = format("worst relative error / n = %.2e (limit 1e-12)", worst);
  return o;
}

Outcome classical_reduction() {
  Outcome o;
  oracle::Rng rng(1002);
  const double u = std::numeric_limits<double>::epsilon() / 2;
  auto quad = scalar_toy<double>(1.0, ToyKind::quadratic, 0.5);
  auto wind = wind_oscillation();
  quad.m.setZero();
  wind.m.setZero();
  const std::vector<std::pair<Method<double>, Method<double>>> pairs = {
      {make_method<double>(MethodId::mverk41), make_method<double>(MethodId::rk4)},
      {make_method<double>(MethodId::sverk41), make_method<double>(MethodId::rk4)},
      {make_method<double>(MethodId::mverk42), make_method<double>(MethodId::rk4_38)},
      {make_method<double>(MethodId::sverk42), make_method<double>(MethodId::rk4_38)},
      {make_method<double>(MethodId::mverk4, builtin("three-eighths")), make_method<double>(MethodId::rk4_38)},
      {make_method<double>(MethodId::sverk4, builtin("classical-rk4")), make_method<double>(MethodId::rk4)}};
  double worst = 0.0;
  for (const Problem<double>* p : {&quad, &wind}) {
    for (int trial = 0; trial < 100; ++trial) {
      const State y = oracle::random_vector(rng, p->dim(), 2.0);
      const double h = oracle::uniform(rng, 1e-3, 0.2);
      for (const auto& [method, rk] : pairs) {
        const double diff = (one_step(method, *p, y, h).y_next - one_step(rk, *p, y, h).y_next).cwiseAbs().maxCoeff();
        const double scaled = diff / (u * max_norm(y));
        worst = std::max(worst, scaled);
        o.pass = o.pass && diff <= 10 * u * max_norm(y);
      }
    }
  }
  o.detail = format("worst difference %.2f u |y| (limit 10)", worst);
  return o;
}

Outcome local_order() {
  Outcome o;
  const auto p = scalar_toy<Quad>(Quad(1), ToyKind::quadratic, Quad(0.5));
  const auto g = [&](const Vector<Quad>& y) { return p.rhs(y); };
  std::string ratios;
  for (MethodId id : kNew) {
    const auto method = make_method<Quad>(id);
    for (const char* hs : {"0.1", "0.01", "0.001"}) {
      const Quad h(hs);
      Quad err[2];
      for (int i = 0; i < 2; ++i) {
        const Quad hi = i == 0 ? h : h / 2;
        const Vector<Quad> ref = oracle::rk4_fine<Quad>(g, p.y0, hi, 400);
        err[i] = abs(one_step(method, p, p.y0, hi).y_next(0) - ref(0));
      }
      const double ratio = static_cast<double>(err[0] / err[1]);
      ratios += format(" %.1f", ratio);
      o.pass = o.pass && ratio >= 24.0 && ratio <= 40.0;
    }
  }
  o.detail = "ratios (mverk41, mverk42, sverk41, sverk42 x h = 1e-1, 1e-2, 1e-3):" + ratios;
  return o;
}

Outcome global_order() {
  Outcome o;
  std::string orders;
  const std::vector<std::tuple<Problem<double>, int, int>> cases = {{wind_oscillation(), 4, 8},
                                                                    {nls_pseudospectral(16), 3, 7}};
  for (const auto& [p, k_min, k_max] : cases) {
    const auto ref = reference_solution(p, std::ldexp(1.0, -k_max));
    orders += " " + p.label + ":";
    for (MethodId id : kNew) {
      const auto report = convergence_study(p, make_method<double>(id), k_min, k_max, ref, {.repetitions = 1});
      orders += format(" %.3f", report.fitted_order);
      o.pass = o.pass && report.fitted_order >= 3.7 && report.fitted_order <= 4.3;
    }
  }
  o.detail = "fitted orders" + orders;
  return o;
}

Outcome efficiency() {
  Outcome o;
  const auto p = allen_cahn();
  const double h = 1.0 / 512;
  const std::vector<MethodId> ids = {MethodId::mverk41, MethodId::sverk41, MethodId::erk_hochbruck5};
  std::vector<double> best(ids.size(), std::numeric_limits<double>::infinity());
  std::vector<Method<double>> methods;
  for (MethodId id : ids) methods.push_back(make_method<double>(id));
  for (int round = 0; round < 100; ++round)
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto run = integrate(methods[i], p, h, 0.5);
      best[i] = std::min(best[i], run.wall_time_steps / static_cast<double>(run.steps));
    }
  o.pass = best[0] < best[2] && best[1] < best[2];
  o.detail = format("fastest of 100 interleaved 256-step runs, us/step at h = 2^-9: mverk41 %.2f, sverk41 %.2f, erk-hochbruck5 %.2f", best[0] * 1e6,
                    best[1] * 1e6, best[2] * 1e6);
  return o;
}

Outcome derivative_products() {
  Outcome o;
  oracle::Rng rng(1007);
  const std::vector<Problem<double>> problems = {scalar_toy<double>(1.0, ToyKind::linear),
                                                 scalar_toy<double>(1.0, ToyKind::quadratic, 0.5), wind_oscillation(),
                                                 allen_cahn(), nls_pseudospectral()};
  double worst = 0.0;
  for (const auto& p : problems) {
    for (int probe = 0; probe < 100; ++probe) {
      const State y = p.y0 + oracle::random_vector(rng, p.dim(), 0.5);
      const State u = oracle::random_vector(rng, p.dim());
      const State v = oracle::random_vector(rng, p.dim());
      const State fd_j = oracle::fd_directional(p.f, y, u);
      const auto jv = [&](const State& z) { return p.jvp(z, v); };
      const State fd_h = oracle::fd_directional(jv, y, u);
      const double ej = (p.jvp(y, u) - fd_j).cwiseAbs().maxCoeff() / std::max(1.0, max_norm(fd_j));
      const double eh = (p.hvp(y, u, v) - fd_h).cwiseAbs().maxCoeff() / std::max(1.0, max_norm(fd_h));
      worst = std::max({worst, ej, eh});
    }
  }
  o.pass = worst <= 1e-6;
  o.detail = format("worst relative discrepancy %.2e over 5 problems x 100 probes", worst);
  return o;
}

Outcome phi_recurrence() {
  Outcome o;
  oracle::Rng rng(1008);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(trial % 16);
    DenseMatrix a;
    if (trial % 2 == 0) {
      a = oracle::random_symmetric(rng, n, -50.0, 0.0);
    } else {
      DenseMatrix t = DenseMatrix::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        t(i, i) = oracle::uniform(rng, -50.0, 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) t(i, j) = oracle::uniform(rng, -1.0, 1.0);
      }
      const DenseMatrix q = oracle::random_orthogonal(rng, n);
      a = q * t * q.transpose();
    }
    const auto set = phi_set(a, kMaxPhiOrder);
    double factorial = 1.0;
    for (int k = 0; k < kMaxPhiOrder; ++k) {
      if (k > 0) factorial *= k;
      const DenseMatrix residual = a * set[k + 1] - set[k] + DenseMatrix::Identity(n, n) / factorial;
      worst = std::max(worst, residual.cwiseAbs().maxCoeff());
    }
  }
  o.pass = worst <= 1e-10;
  o.detail = format("max |A phi_{k+1} - phi_k + I/k!| = %.2e", worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"order conditions", order_conditions},
      {"homogeneous exactness", homogeneous_exactness},
      {"classical reduction", classical_reduction},
      {"local order 5", local_order},
      {"global order 4", global_order},
      {"per-step efficiency", efficiency},
      {"derivative products", derivative_products},
      {"phi recurrence", phi_recurrence}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
