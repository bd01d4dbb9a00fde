#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <string>
#include <string_view>

#include "expint/linalg.hpp"

namespace expint {

/// Explicit Runge-Kutta coefficients (A, b, c) with c_i = sum_j a_ij.
template <class Real>
class BasicTableau {
 public:
  BasicTableau() = default;

  /// Validates strict lower triangularity and derives c from the row sums.
  BasicTableau(Matrix<Real> a, Vector<Real> b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != a_.cols() || a_.rows() != b_.size() || a_.rows() == 0)
      throw DimensionError("tableau: A must be s x s and b of length s");
    if (!all_finite(a_) || !all_finite(b_)) throw DomainError("tableau: non-finite coefficient");
    for (Eigen::Index i = 0; i < a_.rows(); ++i)
      for (Eigen::Index j = i; j < a_.cols(); ++j)
        if (a_(i, j) != Real(0))
          throw ConfigError("tableau: a(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                            ") must be zero for an explicit method");
    c_ = Vector<Real>::Zero(a_.rows());
    for (Eigen::Index i = 0; i < a_.rows(); ++i)
      for (Eigen::Index j = 0; j < i; ++j) c_(i) += a_(i, j);
  }

  int stages() const noexcept { return static_cast<int>(b_.size()); }
  const Matrix<Real>& a() const noexcept { return a_; }
  const Vector<Real>& b() const noexcept { return b_; }
  const Vector<Real>& c() const noexcept { return c_; }
  Real a(int i, int j) const { return a_(i, j); }
  Real b(int i) const { return b_(i); }
  Real c(int i) const { return c_(i); }

  template <class Other>
  BasicTableau<Other> cast() const {
    return BasicTableau<Other>(a_.template cast<Other>(), b_.template cast<Other>());
  }

 private:
  Matrix<Real> a_;
  Vector<Real> b_;
  Vector<Real> c_;
};

using Tableau = BasicTableau<double>;

enum class BuiltinTableau { classical_rk4, three_eighths };

BuiltinTableau parse_builtin_tableau(std::string_view name);
std::string_view to_string(BuiltinTableau which);

/// Coefficients computed in the target precision, so 1/3 is as exact as Real allows.
template <class Real>
BasicTableau<Real> builtin_tableau(BuiltinTableau which) {
  Matrix<Real> a = Matrix<Real>::Zero(4, 4);
  Vector<Real> b(4);
  const Real one(1);
  switch (which) {
    case BuiltinTableau::classical_rk4:
      a(1, 0) = one / 2;
      a(2, 1) = one / 2;
      a(3, 2) = one;
      b << one / 6, Real(2) / 6, Real(2) / 6, one / 6;
      break;
    case BuiltinTableau::three_eighths:
      a(1, 0) = one / 3;
      a(2, 0) = -one / 3;
      a(2, 1) = one;
      a(3, 0) = one;
      a(3, 1) = -one;
      a(3, 2) = one;
      b << one / 8, Real(3) / 8, Real(3) / 8, one / 8;
      break;
  }
  return BasicTableau<Real>(std::move(a), std::move(b));
}

/// Lookup by name: "classical-rk4" or "three-eighths".
Tableau builtin(std::string_view name);

inline constexpr double kOrderConditionTolerance = 1e-14;

struct OrderConditionReport {
  /// LHS - RHS for: sum b = 1, b.c = 1/2, b.c^2 = 1/3, b.A.c = 1/6,
  /// b.c^3 = 1/4, (b*c).A.c = 1/8, b.A.c^2 = 1/12, b4 a43 a32 c2 = 1/24.
  std::array<double, 8> residuals{};
  bool satisfied = false;

  double max_abs_residual() const;
};

/// The fourth-order conditions for four-stage explicit schemes. Each
/// left-hand side is accumulated from smallest to largest magnitude term.
OrderConditionReport check_order4(const Tableau& t);

/// Same conditions, terms summed in the given direction; exposed for testing
/// summation-order sensitivity.
OrderConditionReport check_order4(const Tableau& t, bool ascending_magnitude);

/// {"s":4,"A":[[...]],"b":[...],"c":[...]}; c is optional on input and must
/// match the row sums of A within kOrderConditionTolerance when present.
Tableau tableau_from_json(std::string_view text);
std::string tableau_to_json(const Tableau& t);
Tableau load_tableau(const std::string& path);

}  // namespace expint
