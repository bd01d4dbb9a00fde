#include "expint/problems.hpp"

#include <cmath>

namespace expint {

Problem<double> wind_oscillation(double theta, double r, State y0, double t_end) {
  if (r < 0.0) throw ConfigError("wind: r must be non-negative");
  if (theta < 0.0 || theta > std::numbers::pi / 2 + 1e-15) throw ConfigError("wind: theta must lie in [0, pi/2]");
  if (y0.size() == 0) y0 = State::Unit(2, 0);
  if (y0.size() != 2) throw DimensionError("wind: initial state must have 2 components");

  const double zeta = r * std::cos(theta);
  const double lambda = r * std::sin(theta);
  Problem<double> p;
  p.label = "wind";
  p.m.resize(2, 2);
  p.m << zeta, lambda, -lambda, zeta;
  p.f = [](const State& x) -> State {
    State out(2);
    out << x(0) * x(1), 0.5 * (x(0) * x(0) - x(1) * x(1));
    return out;
  };
  p.jvp = [](const State& x, const State& v) -> State {
    State out(2);
    out << v(0) * x(1) + x(0) * v(1), x(0) * v(0) - x(1) * v(1);
    return out;
  };
  p.hvp = [](const State&, const State& u, const State& v) -> State {
    State out(2);
    out << u(0) * v(1) + u(1) * v(0), u(0) * v(0) - u(1) * v(1);
    return out;
  };
  p.y0 = std::move(y0);
  p.t0 = 0.0;
  p.t_end = t_end;
  p.parameters = {{"theta", theta}, {"r", r}, {"zeta", zeta}, {"lambda", lambda},
                  {"x1_0", p.y0(0)}, {"x2_0", p.y0(1)}};
  return p;
}

State chebyshev_points(int n) {
  if (n < 1) throw ConfigError("chebyshev_points: n must be positive");
  State x(n + 1);
  for (int i = 0; i <= n; ++i) x(i) = std::cos(std::numbers::pi * i / n);
  return x;
}

DenseMatrix chebyshev_d1(int n) {
  const State x = chebyshev_points(n);
  State c = State::Ones(n + 1);
  c(0) = c(n) = 2.0;
  for (int i = 1; i <= n; i += 2) c(i) = -c(i);
  DenseMatrix d = DenseMatrix::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      if (i != j) d(i, j) = c(i) / c(j) / (x(i) - x(j));
  // Diagonal from the row-sum identity: D annihilates constants.
  for (int i = 0; i <= n; ++i) d(i, i) = -(d.row(i).sum() - d(i, i));
  return d;
}

DenseMatrix chebyshev_d2(int n) {
  const DenseMatrix d = chebyshev_d1(n);
  return d * d;
}

double allen_cahn_initial(double x) { return 0.53 * x + 0.47 * std::sin(-1.5 * std::numbers::pi * x); }

Problem<double> allen_cahn(double epsilon, int n, AllenCahnGrid grid, double t_end) {
  if (n < 4) throw ConfigError("allen-cahn: n must be at least 4");
  if (!(epsilon > 0.0)) throw ConfigError("allen-cahn: epsilon must be positive");

  State nodes(n + 1);
  DenseMatrix d2;
  if (grid == AllenCahnGrid::chebyshev) {
    nodes = chebyshev_points(n);
    d2 = chebyshev_d2(n);
  } else {
    // Uniform x_i = -1 + i dx with the three-point second difference.
    const double dx = 2.0 / n;
    d2 = DenseMatrix::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) nodes(i) = -1.0 + i * dx;
    for (int i = 1; i < n; ++i) {
      d2(i, i - 1) = 1.0 / (dx * dx);
      d2(i, i) = -2.0 / (dx * dx);
      d2(i, i + 1) = 1.0 / (dx * dx);
    }
  }
  const int first = 0, last = n;
  const double u_first = allen_cahn_initial(nodes(first));
  const double u_last = allen_cahn_initial(nodes(last));

  const int m = n - 1;
  Problem<double> p;
  p.label = "allen-cahn";
  p.m = -epsilon * d2.block(1, 1, m, m);
  const State lift = epsilon * (d2.block(1, first, m, 1) * u_first + d2.block(1, last, m, 1) * u_last);
  p.f = [lift](const State& u) -> State { return u - u.cwiseProduct(u).cwiseProduct(u) + lift; };
  p.jvp = [](const State& u, const State& v) -> State {
    return (1.0 - 3.0 * u.array().square()).matrix().cwiseProduct(v);
  };
  p.hvp = [](const State& u, const State& a, const State& b) -> State {
    return -6.0 * u.cwiseProduct(a).cwiseProduct(b);
  };
  p.y0.resize(m);
  for (int i = 0; i < m; ++i) p.y0(i) = allen_cahn_initial(nodes(i + 1));
  p.t0 = 0.0;
  p.t_end = t_end;
  p.parameters = {{"epsilon", epsilon},
                  {"n", n},
                  {"chebyshev_grid", grid == AllenCahnGrid::chebyshev ? 1.0 : 0.0},
                  {"u_left", u_last},
                  {"u_right", u_first}};
  return p;
}

DenseMatrix nls_d2(int n, double length) {
  if (n < 4 || n % 2 != 0) throw ConfigError("nls: n must be even and at least 4");
  const double mu = 2.0 * std::numbers::pi / length;
  DenseMatrix d(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) {
        d(j, k) = -mu * mu * (2.0 * (n / 2.0) * (n / 2.0) + 1.0) / 6.0;
      } else {
        const double xj = j * length / n, xk = k * length / n;
        const double s = std::sin(mu * (xj - xk) / 2.0);
        const double sign = (j + k + 1) % 2 == 0 ? 1.0 : -1.0;
        d(j, k) = 0.5 * mu * mu * sign / (s * s);
      }
    }
  }
  return d;
}

Problem<double> nls_pseudospectral(int n, double t_end) {
  const double length = kNlsLength;
  const DenseMatrix d2 = nls_d2(n, length);
  const double mu = 2.0 * std::numbers::pi / length;

  Problem<double> p;
  p.label = "nls";
  p.m = DenseMatrix::Zero(2 * n, 2 * n);
  p.m.topRightCorner(n, n) = d2;
  p.m.bottomLeftCorner(n, n) = -d2;
  p.f = [n](const State& y) -> State {
    const auto pp = y.head(n).array();
    const auto qq = y.tail(n).array();
    const Eigen::ArrayXd rho = pp.square() + qq.square();
    State out(2 * n);
    out.head(n) = (-2.0 * rho * qq).matrix();
    out.tail(n) = (2.0 * rho * pp).matrix();
    return out;
  };
  p.jvp = [n](const State& y, const State& v) -> State {
    const auto pp = y.head(n).array(), qq = y.tail(n).array();
    const auto a = v.head(n).array(), b = v.tail(n).array();
    const Eigen::ArrayXd rho = pp.square() + qq.square();
    const Eigen::ArrayXd drho = 2.0 * (pp * a + qq * b);
    State out(2 * n);
    out.head(n) = (-2.0 * (drho * qq + rho * b)).matrix();
    out.tail(n) = (2.0 * (drho * pp + rho * a)).matrix();
    return out;
  };
  p.hvp = [n](const State& y, const State& u, const State& v) -> State {
    const auto pp = y.head(n).array(), qq = y.tail(n).array();
    const auto a = u.head(n).array(), b = u.tail(n).array();
    const auto c = v.head(n).array(), d = v.tail(n).array();
    const Eigen::ArrayXd du = 2.0 * (pp * a + qq * b);
    const Eigen::ArrayXd dv = 2.0 * (pp * c + qq * d);
    const Eigen::ArrayXd duv = 2.0 * (a * c + b * d);
    State out(2 * n);
    out.head(n) = (-2.0 * (duv * qq + du * d + dv * b)).matrix();
    out.tail(n) = (2.0 * (duv * pp + du * c + dv * a)).matrix();
    return out;
  };
  p.y0 = State::Zero(2 * n);
  for (int j = 0; j < n; ++j) p.y0(j) = 0.5 + 0.025 * std::cos(mu * j * length / n);
  p.t0 = 0.0;
  p.t_end = t_end;
  p.parameters = {{"n", n}, {"length", length}, {"mu", mu}};
  return p;
}

}  // namespace expint
