#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "expint/error.hpp"

namespace expint {

template <class Real>
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using DenseMatrix = Matrix<double>;
using State = Vector<double>;

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  using std::isfinite;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (!isfinite(x(i, j))) return false;
  return true;
}

template <class Real>
void require_square(const Matrix<Real>& a, const char* what) {
  if (a.rows() != a.cols())
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
}

template <class Real>
void require_finite(const Matrix<Real>& a, const char* what) {
  if (!all_finite(a)) throw DomainError(std::string(what) + ": non-finite matrix entry");
}

/// Dense product A*v; callers build M^2 v, M^3 v by repeated application.
template <class Real>
Vector<Real> matvec(const Matrix<Real>& a, const Vector<Real>& v) {
  if (a.cols() != v.size())
    throw DimensionError("matvec: " + std::to_string(a.cols()) + " columns vs vector of length " +
                         std::to_string(v.size()));
  return a * v;
}

template <class Real>
Real max_norm(const Vector<Real>& v) {
  return v.size() == 0 ? Real(0) : v.cwiseAbs().maxCoeff();
}

/// Induced 1-norm (max column sum).
template <class Real>
Real norm1(const Matrix<Real>& a) {
  if (a.size() == 0) return Real(0);
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace expint
