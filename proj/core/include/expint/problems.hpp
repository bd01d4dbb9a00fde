#pragma once

#include <numbers>

#include "expint/problem.hpp"

namespace expint {

/// Averaged wind-induced oscillation system
///   x' = [[-zeta, -lambda], [lambda, -zeta]] x + (x1 x2, (x1^2 - x2^2)/2)
/// with zeta = r cos(theta), lambda = r sin(theta). M is the negated linear part.
Problem<double> wind_oscillation(double theta = std::numbers::pi / 2, double r = 20.0, State y0 = State(),
                                 double t_end = 10.0);

enum class AllenCahnGrid { chebyshev, uniform };

/// Chebyshev points x_i = cos(i pi / n), i = 0..n.
State chebyshev_points(int n);
/// First-derivative Chebyshev collocation matrix on chebyshev_points(n).
DenseMatrix chebyshev_d1(int n);
/// Second-derivative matrix D1 * D1, size (n+1) x (n+1).
DenseMatrix chebyshev_d2(int n);

/// u_t = eps u_xx + u - u^3 on (-1, 1), u(+-1) = +-1, with
/// u(x, 0) = 0.53 x + 0.47 sin(-1.5 pi x). The n-1 interior nodes are the
/// unknowns; M = -eps * D2 restricted to the interior, and the Dirichlet
/// columns become a constant lift inside f.
Problem<double> allen_cahn(double epsilon = 0.01, int n = 32, AllenCahnGrid grid = AllenCahnGrid::chebyshev,
                           double t_end = 10.0);

double allen_cahn_initial(double x);

/// Periodic pseudospectral second-derivative matrix on x_j = j L / n with
/// mu = 2 pi / L.
DenseMatrix nls_d2(int n, double length);

inline const double kNlsLength = 4.0 * std::numbers::sqrt2 * std::numbers::pi;

/// i psi_t + psi_xx + 2 |psi|^2 psi = 0, psi(x, 0) = 0.5 + 0.025 cos(mu x),
/// split into (p, q) = (Re psi, Im psi). State is (p_0..p_{n-1}, q_0..q_{n-1})
/// and M = [[0, D2], [-D2, 0]].
Problem<double> nls_pseudospectral(int n = 16, double t_end = 10.0);

}  // namespace expint
