#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "expint/matfun.hpp"
#include "expint/method.hpp"
#include "expint/problem.hpp"
#include "expint/tableau.hpp"

namespace expint {

/// A method identifier bound to its real coefficients.
template <class Real>
struct Method {
  MethodId id = MethodId::mverk41;
  Family family = Family::mverk;
  /// Real-valued tableau (empty for the two phi-function baselines).
  BasicTableau<Real> tableau;

  std::string name() const { return std::string(to_string(id)); }
};

template <class Real>
Method<Real> make_method(MethodId id, const std::optional<BasicTableau<Real>>& custom = std::nullopt) {
  Method<Real> method;
  method.id = id;
  method.family = family_of(id);
  if (needs_custom_tableau(id)) {
    if (!custom) throw ConfigError(std::string(to_string(id)) + " requires a tableau");
    if (custom->stages() != 4)
      throw UnsupportedError(std::string(to_string(id)) + ": only four-stage tableaux are supported");
    method.tableau = *custom;
  } else if (auto which = builtin_tableau_of(id)) {
    if (custom) throw ConfigError(std::string(to_string(id)) + " has fixed coefficients; use mverk4/sverk4");
    method.tableau = builtin_tableau<Real>(*which);
  } else if (custom) {
    throw ConfigError(std::string(to_string(id)) + " does not take a custom tableau");
  }
  return method;
}

inline Method<double> make_method(std::string_view name, const std::optional<Tableau>& custom = std::nullopt) {
  return make_method<double>(parse_method(name), custom);
}

/// Matrix-valued tableau of a phi-function baseline, assembled once per (M, h):
///   Y_i = E_i y0 + h sum_j A_ij f(Y_j),  y1 = E y0 + h sum_i B_i f(Y_i).
template <class Real>
struct ErkCoefficients {
  int stages = 0;
  std::vector<Real> c;
  /// Index into CoefficientCache exponentials for each stage; -1 when c_i = 0.
  std::vector<int> stage_exp;
  /// a[i][j]; nullopt marks a structural zero.
  std::vector<std::vector<std::optional<Matrix<Real>>>> a;
  std::vector<std::optional<Matrix<Real>>> b;
};

/// Matrix functions of (M, h) shared by every step of a fixed-step run.
/// Immutable after build().
template <class Real>
class CoefficientCache {
 public:
  struct StageExp {
    Real fraction;
    Matrix<Real> matrix;
  };
  struct StagePhi {
    Real fraction;
    PhiSet<Real> phis;
  };

  static CoefficientCache build(const Method<Real>& method, const Matrix<Real>& m, Real h);

  Real h() const noexcept { return h_; }
  Eigen::Index dim() const noexcept { return dim_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  const Matrix<Real>& exp_full() const noexcept { return exp_full_; }

  /// e^{-c h M}; CacheMissError if c was not requested at build time.
  const Matrix<Real>& exp_stage(Real fraction) const;
  bool has_exp_stage(Real fraction) const noexcept { return find_exp(fraction) >= 0; }
  /// phi_j(-c h M), j = 0..3; baselines only.
  const PhiSet<Real>& phi_stage(Real fraction) const;
  const std::vector<StageExp>& stage_exponentials() const noexcept { return exps_; }
  const ErkCoefficients<Real>& erk() const;

  /// True when built for exactly this (M, h).
  bool matches(const Matrix<Real>& m, Real h) const {
    return h == h_ && m.rows() == dim_ && m.cols() == dim_ && hash_matrix(m) == fingerprint_;
  }

  static std::uint64_t hash_matrix(const Matrix<Real>& m);

 private:
  int find_exp(Real fraction) const noexcept;
  void add_exp(Real fraction, const Matrix<Real>& m);

  Real h_ = Real(0);
  Eigen::Index dim_ = 0;
  std::uint64_t fingerprint_ = 0;
  Matrix<Real> exp_full_;
  std::vector<StageExp> exps_;
  std::vector<StagePhi> phis_;
  std::optional<ErkCoefficients<Real>> erk_;
};

template <class Real>
struct StepResult {
  Vector<Real> y_next;
  /// Internal stages Y_1..Y_s when requested.
  std::vector<Vector<Real>> stage_values;
};

namespace detail {

template <class Real>
bool same_fraction(Real x, Real y) {
  using std::abs;
  return abs(x - y) <= Real(64) * std::numeric_limits<Real>::epsilon();
}

template <class Real>
void check_stage(const Vector<Real>& y, std::size_t stage) {
  if (!all_finite(y)) throw DivergenceError(stage);
}

template <class Real>
void require_derivatives(const Problem<Real>& p) {
  if (!p.has_jvp()) throw CapabilityError("problem '" + p.label + "' provides no Jacobian-vector product f'(y)v");
  if (!p.has_hvp()) throw CapabilityError("problem '" + p.label + "' provides no Hessian product f''(y)(u,v)");
}

template <class Real>
void require_cache_for(const CoefficientCache<Real>& cache, const Problem<Real>& p) {
  if (cache.dim() != p.dim() || p.m.rows() != p.dim())
    throw DimensionError("coefficient cache built for dimension " + std::to_string(cache.dim()) +
                         ", problem has dimension " + std::to_string(p.dim()));
}

/// Correction term of the modified (simplified = false) or simplified
/// (simplified = true) four-stage methods. f0 = f(y0), my0 = M y0.
///
/// The modified correction is factored as M * inner, where
///   v3    = M f - f' g
///   inner = -h^2/2 f + h^3/6 v3 + h^4/24 (-M v3 - f''(g, g) - f'(f' g - M g))
/// so only four products with M are needed. The simplified variant adds
///   f'(-h^3/6 M f + h^4/24 (M v3 - f' M f)) - h^4/8 f''(M f, g).
template <class Real>
Vector<Real> correction_w4(const Problem<Real>& p, const Vector<Real>& y0, const Vector<Real>& f0,
                           const Vector<Real>& my0, Real h, bool simplified) {
  const Matrix<Real>& m = p.m;
  const Real h2 = h * h / Real(2);
  const Real h3 = h * h * h / Real(6);
  const Real h4 = h * h * h * h / Real(24);

  const Vector<Real> g = f0 - my0;
  Vector<Real> mf(g.size()), v3(g.size()), mv3(g.size()), mg(g.size()), w(g.size());
  mf.noalias() = m * f0;
  const Vector<Real> fg = p.jvp(y0, g);
  v3 = mf - fg;
  mv3.noalias() = m * v3;
  mg.noalias() = m * g;
  mg = fg - mg;
  Vector<Real> inner = -h2 * f0 + h3 * v3;
  inner -= h4 * mv3;
  inner -= h4 * p.hvp(y0, g, g);
  inner -= h4 * p.jvp(y0, mg);
  w.noalias() = m * inner;
  if (simplified) {
    mv3 -= p.jvp(y0, mf);
    inner = -h3 * mf + h4 * mv3;
    w += p.jvp(y0, inner);
    w -= (Real(3) * h4) * p.hvp(y0, mf, g);
  }
  return w;
}

}  // namespace detail

/// w_4 of the modified family, built from products with M and the problem's
/// jvp/hvp only.
template <class Real>
Vector<Real> w4_mverk(const Problem<Real>& p, const Vector<Real>& y0, Real h) {
  detail::require_derivatives(p);
  const Vector<Real> my0 = matvec(p.m, y0);
  return detail::correction_w4(p, y0, p.f(y0), my0, h, false);
}

/// w-bar_4 of the simplified family.
template <class Real>
Vector<Real> w4_sverk(const Problem<Real>& p, const Vector<Real>& y0, Real h) {
  detail::require_derivatives(p);
  const Vector<Real> my0 = matvec(p.m, y0);
  return detail::correction_w4(p, y0, p.f(y0), my0, h, true);
}

/// Explicit Runge-Kutta step on g(y) = -M y + f(y).
template <class Real>
StepResult<Real> rk4_step(const BasicTableau<Real>& t, const Problem<Real>& p, const Vector<Real>& y0, Real h,
                          bool keep_stages = false) {
  const int s = t.stages();
  if (y0.size() != p.dim()) throw DimensionError("rk step: state has wrong dimension");
  std::vector<Vector<Real>> k(static_cast<std::size_t>(s));
  StepResult<Real> out;
  for (int i = 0; i < s; ++i) {
    Vector<Real> yi = y0;
    if (i > 0) {
      Vector<Real> acc = Vector<Real>::Zero(y0.size());
      for (int j = 0; j < i; ++j)
        if (t.a(i, j) != Real(0)) acc += t.a(i, j) * k[static_cast<std::size_t>(j)];
      yi = y0 + h * acc;
    }
    detail::check_stage(yi, static_cast<std::size_t>(i + 1));
    const Vector<Real> fy = p.f(yi);
    k[static_cast<std::size_t>(i)] = fy - p.m * yi;
    if (keep_stages) out.stage_values.push_back(std::move(yi));
  }
  Vector<Real> acc = Vector<Real>::Zero(y0.size());
  for (int i = 0; i < s; ++i)
    if (t.b(i) != Real(0)) acc += t.b(i) * k[static_cast<std::size_t>(i)];
  out.y_next = y0 + h * acc;
  detail::check_stage(out.y_next, 0);
  return out;
}

/// Modified exponential step: Runge-Kutta stages on g, exponential update
///   y1 = e^{-hM} y0 + h sum_i b_i f(Y_i) + w_4.
template <class Real>
StepResult<Real> mverk4_step(const BasicTableau<Real>& t, const CoefficientCache<Real>& cache,
                             const Problem<Real>& p, const Vector<Real>& y0, bool keep_stages = false) {
  if (t.stages() != 4) throw UnsupportedError("mverk4_step: tableau must have four stages");
  detail::require_derivatives(p);
  detail::require_cache_for(cache, p);
  if (y0.size() != p.dim()) throw DimensionError("mverk4_step: state has wrong dimension");
  const Real h = cache.h();

  const Eigen::Index n = y0.size();
  std::array<Vector<Real>, 4> k, fy;
  Vector<Real> yi(n), acc(n), my(n), my0(n);
  StepResult<Real> out;
  for (int i = 0; i < 4; ++i) {
    if (i == 0) {
      yi = y0;
    } else {
      acc.setZero();
      for (int j = 0; j < i; ++j)
        if (t.a(i, j) != Real(0)) acc += t.a(i, j) * k[static_cast<std::size_t>(j)];
      yi = y0 + h * acc;
    }
    detail::check_stage(yi, static_cast<std::size_t>(i + 1));
    const auto ui = static_cast<std::size_t>(i);
    fy[ui] = p.f(yi);
    Vector<Real>& target = i == 0 ? my0 : my;
    target.noalias() = p.m * yi;
    k[ui] = fy[ui] - target;
    if (keep_stages) out.stage_values.push_back(yi);
  }
  acc.setZero();
  for (int i = 0; i < 4; ++i)
    if (t.b(i) != Real(0)) acc += t.b(i) * fy[static_cast<std::size_t>(i)];
  out.y_next.resize(n);
  out.y_next.noalias() = cache.exp_full() * y0;
  out.y_next += h * acc;
  out.y_next += detail::correction_w4(p, y0, fy[0], my0, h, false);
  detail::check_stage(out.y_next, 0);
  return out;
}

/// Simplified exponential step:
///   Y_i = e^{-c_i hM} y0 + h sum_j a_ij f(Y_j),
///   y1  = e^{-hM} y0 + h sum_i b_i f(Y_i) + w-bar_4.
template <class Real>
StepResult<Real> sverk4_step(const BasicTableau<Real>& t, const CoefficientCache<Real>& cache,
                             const Problem<Real>& p, const Vector<Real>& y0, bool keep_stages = false) {
  if (t.stages() != 4) throw UnsupportedError("sverk4_step: tableau must have four stages");
  detail::require_derivatives(p);
  detail::require_cache_for(cache, p);
  if (y0.size() != p.dim()) throw DimensionError("sverk4_step: state has wrong dimension");
  const Real h = cache.h();

  // e^{-c hM} y0 once per distinct stage fraction.
  struct Propagated {
    Real fraction;
    Vector<Real> value;
  };
  const Eigen::Index n = y0.size();
  std::array<Propagated, 5> propagated;
  std::size_t n_propagated = 0;
  auto propagate = [&](Real c) -> const Vector<Real>& {
    for (std::size_t e = 0; e < n_propagated; ++e)
      if (detail::same_fraction(propagated[e].fraction, c)) return propagated[e].value;
    const Matrix<Real>& e = detail::same_fraction(c, Real(1)) ? cache.exp_full() : cache.exp_stage(c);
    Propagated& slot = propagated[n_propagated++];
    slot.fraction = c;
    slot.value.resize(n);
    slot.value.noalias() = e * y0;
    return slot.value;
  };

  std::array<Vector<Real>, 4> fy;
  Vector<Real> yi(n), acc(n);
  StepResult<Real> out;
  for (int i = 0; i < 4; ++i) {
    if (i == 0) {
      yi = y0;
    } else {
      acc.setZero();
      for (int j = 0; j < i; ++j)
        if (t.a(i, j) != Real(0)) acc += t.a(i, j) * fy[static_cast<std::size_t>(j)];
      const Real c = t.c(i);
      if (c == Real(0))
        yi = y0 + h * acc;
      else
        yi = propagate(c) + h * acc;
    }
    detail::check_stage(yi, static_cast<std::size_t>(i + 1));
    fy[static_cast<std::size_t>(i)] = p.f(yi);
    if (keep_stages) out.stage_values.push_back(yi);
  }
  acc.setZero();
  for (int i = 0; i < 4; ++i)
    if (t.b(i) != Real(0)) acc += t.b(i) * fy[static_cast<std::size_t>(i)];
  out.y_next = propagate(Real(1)) + h * acc;
  Vector<Real> my0(n);
  my0.noalias() = p.m * y0;
  out.y_next += detail::correction_w4(p, y0, fy[0], my0, h, true);
  detail::check_stage(out.y_next, 0);
  return out;
}

/// Standard exponential Runge-Kutta step with the matrix-valued coefficients
/// stored in the cache (Hochbruck-Ostermann five-stage or Krogstad).
template <class Real>
StepResult<Real> erk_step(const CoefficientCache<Real>& cache, const Problem<Real>& p, const Vector<Real>& y0,
                          bool keep_stages = false) {
  detail::require_cache_for(cache, p);
  if (y0.size() != p.dim()) throw DimensionError("erk_step: state has wrong dimension");
  const ErkCoefficients<Real>& coef = cache.erk();
  const Real h = cache.h();
  const auto& exps = cache.stage_exponentials();

  std::vector<std::optional<Vector<Real>>> propagated(exps.size());
  auto propagate = [&](int index) -> const Vector<Real>& {
    auto& slot = propagated[static_cast<std::size_t>(index)];
    if (!slot) slot = exps[static_cast<std::size_t>(index)].matrix * y0;
    return *slot;
  };

  const auto s = static_cast<std::size_t>(coef.stages);
  std::vector<Vector<Real>> fy(s);
  StepResult<Real> out;
  for (std::size_t i = 0; i < s; ++i) {
    Vector<Real> yi;
    if (i == 0) {
      yi = y0;
    } else {
      Vector<Real> acc = Vector<Real>::Zero(y0.size());
      for (std::size_t j = 0; j < i; ++j)
        if (coef.a[i][j]) acc.noalias() += *coef.a[i][j] * fy[j];
      const int e = coef.stage_exp[i];
      yi = (e < 0 ? y0 : propagate(e)) + h * acc;
    }
    detail::check_stage(yi, i + 1);
    fy[i] = p.f(yi);
    if (keep_stages) out.stage_values.push_back(std::move(yi));
  }
  Vector<Real> acc = Vector<Real>::Zero(y0.size());
  for (std::size_t i = 0; i < s; ++i)
    if (coef.b[i]) acc.noalias() += *coef.b[i] * fy[i];
  out.y_next = cache.exp_full() * y0 + h * acc;
  detail::check_stage(out.y_next, 0);
  return out;
}

template <class Real>
StepResult<Real> erk_hochbruck5_step(const CoefficientCache<Real>& cache, const Problem<Real>& p,
                                     const Vector<Real>& y0, bool keep_stages = false) {
  if (cache.erk().stages != 5) throw CacheMissError("cache does not hold Hochbruck-Ostermann coefficients");
  return erk_step(cache, p, y0, keep_stages);
}

template <class Real>
StepResult<Real> erk_krogstad4_step(const CoefficientCache<Real>& cache, const Problem<Real>& p,
                                    const Vector<Real>& y0, bool keep_stages = false) {
  if (cache.erk().stages != 4) throw CacheMissError("cache does not hold Krogstad coefficients");
  return erk_step(cache, p, y0, keep_stages);
}

/// One step of any method. rk-family methods ignore the cache apart from h.
template <class Real>
StepResult<Real> step(const Method<Real>& method, const CoefficientCache<Real>& cache, const Problem<Real>& p,
                      const Vector<Real>& y0, bool keep_stages = false) {
  switch (method.family) {
    case Family::mverk: return mverk4_step(method.tableau, cache, p, y0, keep_stages);
    case Family::sverk: return sverk4_step(method.tableau, cache, p, y0, keep_stages);
    case Family::rk: return rk4_step(method.tableau, p, y0, cache.h(), keep_stages);
    case Family::erk_hochbruck5: return erk_hochbruck5_step(cache, p, y0, keep_stages);
    case Family::erk_krogstad4: return erk_krogstad4_step(cache, p, y0, keep_stages);
  }
  throw LookupError("unknown method family");
}

// ---------------------------------------------------------------------------
// CoefficientCache implementation

template <class Real>
std::uint64_t CoefficientCache<Real>::hash_matrix(const Matrix<Real>& m) {
  // FNV-1a over the entries' object representation.
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const unsigned char* bytes, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ull;
    }
  };
  const auto rows = static_cast<std::uint64_t>(m.rows());
  mix(reinterpret_cast<const unsigned char*>(&rows), sizeof rows);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Real v = m.data()[i];
    mix(reinterpret_cast<const unsigned char*>(&v), sizeof v);
  }
  return hash;
}

template <class Real>
int CoefficientCache<Real>::find_exp(Real fraction) const noexcept {
  for (std::size_t i = 0; i < exps_.size(); ++i)
    if (detail::same_fraction(exps_[i].fraction, fraction)) return static_cast<int>(i);
  return -1;
}

template <class Real>
void CoefficientCache<Real>::add_exp(Real fraction, const Matrix<Real>& m) {
  if (find_exp(fraction) < 0) exps_.push_back({fraction, m});
}

template <class Real>
const Matrix<Real>& CoefficientCache<Real>::exp_stage(Real fraction) const {
  const int i = find_exp(fraction);
  if (i < 0)
    throw CacheMissError("no cached stage exponential for fraction " + std::to_string(static_cast<double>(fraction)));
  return exps_[static_cast<std::size_t>(i)].matrix;
}

template <class Real>
const PhiSet<Real>& CoefficientCache<Real>::phi_stage(Real fraction) const {
  for (const auto& entry : phis_)
    if (detail::same_fraction(entry.fraction, fraction)) return entry.phis;
  throw CacheMissError("no cached phi functions for fraction " + std::to_string(static_cast<double>(fraction)));
}

template <class Real>
const ErkCoefficients<Real>& CoefficientCache<Real>::erk() const {
  if (!erk_) throw CacheMissError("cache holds no exponential Runge-Kutta coefficients");
  return *erk_;
}

template <class Real>
CoefficientCache<Real> CoefficientCache<Real>::build(const Method<Real>& method, const Matrix<Real>& m, Real h) {
  using std::isfinite;
  require_square(m, "CoefficientCache");
  if (!isfinite(h) || !(h > Real(0))) throw ConfigError("stepsize must be positive and finite");

  CoefficientCache cache;
  cache.h_ = h;
  cache.dim_ = m.rows();
  cache.fingerprint_ = hash_matrix(m);
  const Matrix<Real> z = h * m;

  switch (method.family) {
    case Family::rk:
      break;
    case Family::mverk:
      cache.exp_full_ = matexp<Real>(-z);
      cache.add_exp(Real(1), cache.exp_full_);
      break;
    case Family::sverk: {
      cache.exp_full_ = matexp<Real>(-z);
      cache.add_exp(Real(1), cache.exp_full_);
      const auto& c = method.tableau.c();
      for (Eigen::Index i = 0; i < c.size(); ++i)
        if (c(i) != Real(0) && cache.find_exp(c(i)) < 0) cache.add_exp(c(i), matexp<Real>(Matrix<Real>(-c(i) * z)));
      break;
    }
    case Family::erk_hochbruck5:
    case Family::erk_krogstad4: {
      const bool five = method.family == Family::erk_hochbruck5;
      const Real half = Real(1) / Real(2);
      const Real quarter = Real(1) / Real(4);
      PhiSet<Real> full = phi_set<Real>(-z, 3);
      PhiSet<Real> mid = phi_set<Real>(Matrix<Real>(-half * z), 3);
      cache.exp_full_ = full[0];
      cache.add_exp(Real(1), full[0]);
      cache.add_exp(half, mid[0]);
      const int e_half = cache.find_exp(half);
      const int e_one = cache.find_exp(Real(1));

      // phi_{j,i} = phi_j(-c_i h M); weights use phi_j(-h M).
      const Matrix<Real>& p1 = full[1];
      const Matrix<Real>& p2 = full[2];
      const Matrix<Real>& p3 = full[3];
      const Matrix<Real>& q1 = mid[1];
      const Matrix<Real>& q2 = mid[2];
      const Matrix<Real>& q3 = mid[3];

      ErkCoefficients<Real> coef;
      coef.stages = five ? 5 : 4;
      const auto s = static_cast<std::size_t>(coef.stages);
      coef.a.assign(s, std::vector<std::optional<Matrix<Real>>>(s));
      coef.b.assign(s, std::nullopt);
      coef.c = five ? std::vector<Real>{Real(0), half, half, Real(1), half}
                    : std::vector<Real>{Real(0), half, half, Real(1)};
      coef.stage_exp = five ? std::vector<int>{-1, e_half, e_half, e_one, e_half}
                            : std::vector<int>{-1, e_half, e_half, e_one};

      coef.a[1][0] = half * q1;
      coef.a[2][0] = half * q1 - q2;
      coef.a[2][1] = q2;
      if (five) {
        coef.a[3][0] = p1 - Real(2) * p2;
        coef.a[3][1] = p2;
        coef.a[3][2] = p2;
        const Matrix<Real> a52 = half * q2 - p3 + quarter * p2 - half * q3;
        const Matrix<Real> a54 = quarter * q2 - a52;
        coef.a[4][0] = half * q1 - Real(2) * a52 - a54;
        coef.a[4][1] = a52;
        coef.a[4][2] = a52;
        coef.a[4][3] = a54;
        coef.b[0] = p1 - Real(3) * p2 + Real(4) * p3;
        coef.b[3] = -p2 + Real(4) * p3;
        coef.b[4] = Real(4) * p2 - Real(8) * p3;
      } else {
        coef.a[3][0] = p1 - Real(2) * p2;
        coef.a[3][2] = Real(2) * p2;
        coef.b[0] = p1 - Real(3) * p2 + Real(4) * p3;
        coef.b[1] = Real(2) * p2 - Real(4) * p3;
        coef.b[2] = Real(2) * p2 - Real(4) * p3;
        coef.b[3] = -p2 + Real(4) * p3;
      }
      cache.phis_.push_back({Real(1), std::move(full)});
      cache.phis_.push_back({half, std::move(mid)});
      cache.erk_ = std::move(coef);
      break;
    }
  }
  return cache;
}

// ---------------------------------------------------------------------------
// Fixed-step time loop

template <class Real>
struct Trajectory {
  Vector<Real> final_state;
  Real t_final = Real(0);
  std::size_t steps = 0;
  /// Seconds spent building coefficient caches.
  double wall_time_cache = 0.0;
  /// Seconds spent in the step loop, cache construction excluded.
  double wall_time_steps = 0.0;
  /// States at every step boundary (including y0) when requested.
  std::vector<Vector<Real>> states;

  double wall_time_total() const noexcept { return wall_time_cache + wall_time_steps; }
};

struct IntegrateOptions {
  bool record_states = false;
  /// Rebuild the cache before every step (for cache-consistency checks).
  bool rebuild_cache_each_step = false;
};

/// Number of steps of size h covering [t0, t_end]; the ratio must be an
/// integer to within half an ulp.
template <class Real>
std::size_t step_count(Real t0, Real t_end, Real h) {
  using std::abs;
  using std::isfinite;
  using std::round;
  if (!isfinite(h) || !(h > Real(0))) throw ConfigError("stepsize must be positive and finite");
  if (!(t_end > t0)) throw ConfigError("integration interval is empty");
  const Real ratio = (t_end - t0) / h;
  const Real n = round(ratio);
  const Real half_ulp = n * std::numeric_limits<Real>::epsilon() / Real(2);
  if (n < Real(1) || abs(ratio - n) > half_ulp)
    throw ConfigError("interval length " + std::to_string(static_cast<double>(t_end - t0)) +
                      " is not an integer multiple of h = " + std::to_string(static_cast<double>(h)));
  return static_cast<std::size_t>(static_cast<double>(n));
}

template <class Real>
Trajectory<Real> integrate(const Method<Real>& method, const Problem<Real>& p, Real h, Real t_end,
                           const IntegrateOptions& options = {}) {
  using clock = std::chrono::steady_clock;
  const std::size_t n = step_count(p.t0, t_end, h);
  if (needs_derivatives(method.id)) detail::require_derivatives(p);
  if (p.m.rows() != p.dim() || p.m.cols() != p.dim()) throw DimensionError("problem matrix does not match y0");

  Trajectory<Real> out;
  auto start = clock::now();
  auto cache = CoefficientCache<Real>::build(method, p.m, h);
  out.wall_time_cache += std::chrono::duration<double>(clock::now() - start).count();

  Vector<Real> y = p.y0;
  if (options.record_states) {
    out.states.reserve(n + 1);
    out.states.push_back(y);
  }
  double rebuild_seconds = 0.0;
  start = clock::now();
  for (std::size_t i = 0; i < n; ++i) {
    if (options.rebuild_cache_each_step && i > 0) {
      const auto rebuild_start = clock::now();
      cache = CoefficientCache<Real>::build(method, p.m, h);
      rebuild_seconds += std::chrono::duration<double>(clock::now() - rebuild_start).count();
    }
    try {
      y = step(method, cache, p, y).y_next;
    } catch (const DivergenceError& e) {
      throw e.at_step(i);
    }
    if (options.record_states) out.states.push_back(y);
  }
  out.wall_time_steps = std::chrono::duration<double>(clock::now() - start).count() - rebuild_seconds;
  out.wall_time_cache += rebuild_seconds;
  out.final_state = std::move(y);
  out.steps = n;
  out.t_final = p.t0 + static_cast<Real>(static_cast<double>(n)) * h;
  return out;
}

}  // namespace expint
