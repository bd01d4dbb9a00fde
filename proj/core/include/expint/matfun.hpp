#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <type_traits>
#include <vector>

#include "expint/linalg.hpp"

namespace expint {

namespace detail {

// Backward-error thresholds of the [m/m] Pade approximants for IEEE double.
inline constexpr std::array<double, 5> kPadeTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                                     9.504178996162932e-1, 2.097847961257068e0,
                                                     5.371920351148152e0};
inline constexpr std::array<int, 5> kPadeDegree = {3, 5, 7, 9, 13};

inline const std::vector<double>& pade_coefficients(int m) {
  static const std::vector<double> b3 = {120., 60., 12., 1.};
  static const std::vector<double> b5 = {30240., 15120., 3360., 420., 30., 1.};
  static const std::vector<double> b7 = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
  static const std::vector<double> b9 = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                         2162160.,     110880.,     3960.,       90.,        1.};
  static const std::vector<double> b13 = {64764752532480000., 32382376266240000., 7771770303897600.,
                                          1187353796428800.,  129060195264000.,   10559470521600.,
                                          670442572800.,      33522128640.,       1323241920.,
                                          40840800.,          960960.,            16380.,
                                          182.,               1.};
  switch (m) {
    case 3: return b3;
    case 5: return b5;
    case 7: return b7;
    case 9: return b9;
    default: return b13;
  }
}

inline DenseMatrix pade_low(const DenseMatrix& a, int m) {
  const auto& b = pade_coefficients(m);
  const Eigen::Index n = a.rows();
  const DenseMatrix ident = DenseMatrix::Identity(n, n);
  const DenseMatrix a2 = a * a;
  DenseMatrix odd = b[1] * ident;
  DenseMatrix even = b[0] * ident;
  DenseMatrix power = ident;
  for (int k = 2; k <= m; k += 2) {
    power = power * a2;
    even += b[k] * power;
    odd += b[k + 1] * power;
  }
  const DenseMatrix u = a * odd;
  return (even - u).partialPivLu().solve(even + u);
}

inline DenseMatrix pade13(const DenseMatrix& a) {
  const auto& b = pade_coefficients(13);
  const Eigen::Index n = a.rows();
  const DenseMatrix ident = DenseMatrix::Identity(n, n);
  const DenseMatrix a2 = a * a;
  const DenseMatrix a4 = a2 * a2;
  const DenseMatrix a6 = a4 * a2;
  const DenseMatrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const DenseMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
                        b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

inline DenseMatrix expm_pade(const DenseMatrix& a) {
  const double norm = norm1(a);
  for (std::size_t i = 0; i + 1 < kPadeDegree.size(); ++i)
    if (norm <= kPadeTheta[i]) return pade_low(a, kPadeDegree[i]);

  int squarings = 0;
  if (norm > kPadeTheta.back()) squarings = static_cast<int>(std::ceil(std::log2(norm / kPadeTheta.back())));
  DenseMatrix x = pade13(std::ldexp(1.0, -squarings) * a);
  for (int i = 0; i < squarings; ++i) x = x * x;
  return x;
}

// Truncated Taylor series under scaling and squaring; the degree follows the
// scalar type's epsilon, so it serves extended-precision types as well.
template <class Real>
Matrix<Real> expm_taylor(const Matrix<Real>& a) {
  using std::ceil;
  using std::log2;
  const Eigen::Index n = a.rows();
  const Real norm = norm1(a);
  int squarings = 0;
  if (norm > Real(0.25)) squarings = static_cast<int>(ceil(log2(norm / Real(0.25))));
  Real scale = Real(1);
  for (int i = 0; i < squarings; ++i) scale /= Real(2);
  const Matrix<Real> scaled = scale * a;

  const Real eps = std::numeric_limits<Real>::epsilon();
  Matrix<Real> sum = Matrix<Real>::Identity(n, n);
  Matrix<Real> term = Matrix<Real>::Identity(n, n);
  for (int k = 1; k < 200; ++k) {
    term = (scaled * term) / Real(k);
    sum += term;
    if (norm1(term) <= eps * norm1(sum) / Real(16)) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

}  // namespace detail

/// Matrix exponential by scaling and squaring. Double uses a [13/13] Pade core
/// with backward-error degree selection; other scalar types use a Taylor core.
template <class Real>
Matrix<Real> matexp(const Matrix<Real>& a) {
  require_square(a, "matexp");
  require_finite(a, "matexp");
  if (a.rows() == 0) return a;
  Matrix<Real> result;
  if constexpr (std::is_same_v<Real, double>)
    result = detail::expm_pade(a);
  else
    result = detail::expm_taylor(a);
  if (!all_finite(result)) throw DomainError("matexp: result overflowed");
  return result;
}

/// Highest phi index supported by phi_set. No implemented tableau needs phi_4.
inline constexpr int kMaxPhiOrder = 3;

/// {exp(A), phi_1(A), ..., phi_k(A)} for one argument A.
template <class Real>
struct PhiSet {
  int order = 0;
  std::vector<Matrix<Real>> matrices;

  const Matrix<Real>& operator[](int j) const { return matrices.at(static_cast<std::size_t>(j)); }
};

/// Phi functions from one exponential of the augmented block matrix
///
///   [ A  I  0  0 ]
///   [ 0  0  I  0 ]
///   [ 0  0  0  I ]
///   [ 0  0  0  0 ]
///
/// whose first block row is [exp(A), phi_1(A), ..., phi_k(A)].
template <class Real>
PhiSet<Real> phi_set(const Matrix<Real>& a, int k) {
  require_square(a, "phi_set");
  require_finite(a, "phi_set");
  if (k < 0 || k > kMaxPhiOrder)
    throw UnsupportedError("phi_set: order " + std::to_string(k) + " outside supported range 0.." +
                           std::to_string(kMaxPhiOrder));
  const Eigen::Index m = a.rows();
  PhiSet<Real> out;
  out.order = k;
  if (k == 0) {
    out.matrices.push_back(matexp(a));
    return out;
  }
  const Eigen::Index size = m * (k + 1);
  Matrix<Real> big = Matrix<Real>::Zero(size, size);
  big.topLeftCorner(m, m) = a;
  for (int j = 0; j < k; ++j) big.block(j * m, (j + 1) * m, m, m).setIdentity();
  const Matrix<Real> e = matexp(big);
  out.matrices.reserve(static_cast<std::size_t>(k + 1));
  for (int j = 0; j <= k; ++j) out.matrices.push_back(e.block(0, j * m, m, m));
  return out;
}

}  // namespace expint
