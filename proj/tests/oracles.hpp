#pragma once

// Independent reference computations for the test suite. Nothing here calls
// into the library's kernels except for problem callbacks (f, jvp, hvp).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "expint/linalg.hpp"

namespace oracle {

template <class Real>
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <class Real>
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline expint::DenseMatrix random_matrix(Rng& rng, Eigen::Index n, double scale = 1.0) {
  expint::DenseMatrix a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = uniform(rng, -scale, scale);
  return a;
}

inline expint::State random_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
  expint::State v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(rng, -scale, scale);
  return v;
}

inline expint::DenseMatrix random_orthogonal(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<expint::DenseMatrix> qr(random_matrix(rng, n));
  return qr.householderQ() * expint::DenseMatrix::Identity(n, n);
}

/// Q diag(eigs) Q^T with eigenvalues drawn from [lo, hi].
inline expint::DenseMatrix random_symmetric(Rng& rng, Eigen::Index n, double lo, double hi) {
  const expint::DenseMatrix q = random_orthogonal(rng, n);
  expint::State d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = uniform(rng, lo, hi);
  return q * d.asDiagonal() * q.transpose();
}

inline expint::DenseMatrix random_skew(Rng& rng, Eigen::Index n, double scale) {
  const expint::DenseMatrix a = random_matrix(rng, n, scale);
  return 0.5 * (a - a.transpose());
}

inline expint::State brute_matvec(const expint::DenseMatrix& a, const expint::State& v) {
  expint::State out = expint::State::Zero(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) s += a(i, j) * v(j);
    out(i) = s;
  }
  return out;
}

/// exp(A) = V exp(D) V^{-1} from the complex eigendecomposition.
inline expint::DenseMatrix expm_eig(const expint::DenseMatrix& a) {
  Eigen::EigenSolver<expint::DenseMatrix> es(a);
  const Eigen::MatrixXcd v = es.eigenvectors();
  Eigen::VectorXcd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = std::exp(d(i));
  const Eigen::MatrixXcd e = v * d.asDiagonal() * v.inverse();
  return e.real();
}

/// Symmetric case via the self-adjoint solver in long double.
inline expint::DenseMatrix expm_sym(const expint::DenseMatrix& a) {
  using LMat = Mat<long double>;
  Eigen::SelfAdjointEigenSolver<LMat> es(a.cast<long double>());
  const Vec<long double> d = es.eigenvalues().array().exp().matrix();
  const LMat e = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  return e.cast<double>();
}

/// Classical RK4 with `substeps` equal steps over [0, h] on y' = g(y).
template <class Real, class G>
Vec<Real> rk4_fine(const G& g, Vec<Real> y, Real h, int substeps) {
  const Real d = h / Real(substeps);
  const Real half = d / Real(2);
  for (int i = 0; i < substeps; ++i) {
    const Vec<Real> k1 = g(y);
    const Vec<Real> k2 = g(Vec<Real>(y + half * k1));
    const Vec<Real> k3 = g(Vec<Real>(y + half * k2));
    const Vec<Real> k4 = g(Vec<Real>(y + d * k3));
    y += d / Real(6) * (k1 + Real(2) * k2 + Real(2) * k3 + k4);
  }
  return y;
}

/// Jacobian matrix assembled column by column from a jvp callback.
template <class Jvp>
expint::DenseMatrix jacobian(const Jvp& jvp, const expint::State& y) {
  const Eigen::Index n = y.size();
  expint::DenseMatrix j(n, n);
  for (Eigen::Index k = 0; k < n; ++k) j.col(k) = jvp(y, expint::State::Unit(n, k));
  return j;
}

/// The modified correction written term by term with explicit M^2, M^3:
///   -h^2/2 M f + h^3/6 (M^2 f - M J g)
///   + h^4/24 (-M^3 f + M^2 J g - M H(g,g) - M J (M^2 y0 - M f + J g))
template <class Hvp>
expint::State w4_printed(const expint::DenseMatrix& m, const expint::State& f, const expint::DenseMatrix& jac,
                         const Hvp& hvp, const expint::State& y0, double h) {
  const expint::DenseMatrix m2 = m * m;
  const expint::DenseMatrix m3 = m2 * m;
  const expint::State g = -m * y0 + f;
  const double c2 = h * h / 2.0, c3 = h * h * h / 6.0, c4 = h * h * h * h / 24.0;
  return -c2 * m * f + c3 * (m2 * f - m * jac * g) +
         c4 * (-m3 * f + m2 * jac * g - m * hvp(y0, g, g) - m * jac * (m2 * y0 - m * f + jac * g));
}

/// The simplified correction: w4_printed plus
///   -h^3/6 J M f + h^4/24 (J M^2 f - J J M f - J M J g + 3 H(-M f, g))
template <class Hvp>
expint::State w4bar_printed(const expint::DenseMatrix& m, const expint::State& f, const expint::DenseMatrix& jac,
                            const Hvp& hvp, const expint::State& y0, double h) {
  const expint::DenseMatrix m2 = m * m;
  const expint::State g = -m * y0 + f;
  const double c3 = h * h * h / 6.0, c4 = h * h * h * h / 24.0;
  const expint::State mf = m * f;
  return w4_printed(m, f, jac, hvp, y0, h) + c3 * (-jac * mf) +
         c4 * (jac * m2 * f - jac * jac * mf - jac * m * jac * g + 3.0 * hvp(y0, expint::State(-mf), g));
}

inline double rel_diff(const expint::State& a, const expint::State& b) {
  const double diff = (a - b).cwiseAbs().maxCoeff();
  if (diff == 0.0) return 0.0;
  return diff / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

inline double rel_diff(const expint::DenseMatrix& a, const expint::DenseMatrix& b) {
  const double diff = (a - b).cwiseAbs().maxCoeff();
  if (diff == 0.0) return 0.0;
  return diff / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

/// Central difference of f along v.
template <class F>
expint::State fd_directional(const F& f, const expint::State& y, const expint::State& v, double eps = 1e-5) {
  return (f(expint::State(y + eps * v)) - f(expint::State(y - eps * v))) / (2.0 * eps);
}

}  // namespace oracle
