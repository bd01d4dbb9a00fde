#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace expint {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit (non-square input, length mismatch).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf where finite values are required.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Unknown method, tableau or problem name.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration (step count, parameter ranges, CLI input).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A problem lacks a derivative product that the method needs.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A stepper asked the coefficient cache for a matrix it was not built with.
class CacheMissError : public Error {
 public:
  using Error::Error;
};

/// The dual-method reference cross-check disagreed.
class UnreliableReferenceError : public Error {
 public:
  using Error::Error;
};

/// Non-finite state produced while stepping.
class DivergenceError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  DivergenceError(std::size_t stage, std::size_t step = npos)
      : Error(describe(stage, step)), stage_(stage), step_(step) {}
  explicit DivergenceError(const std::string& what) : Error(what), stage_(0), step_(npos) {}

  /// 1-based stage index; 0 means the update itself.
  std::size_t stage() const noexcept { return stage_; }
  /// 0-based step index inside a time loop, npos for a bare step.
  std::size_t step() const noexcept { return step_; }

  DivergenceError at_step(std::size_t step) const { return DivergenceError(stage_, step); }

 private:
  static std::string describe(std::size_t stage, std::size_t step) {
    std::string msg = stage == 0 ? "non-finite update" : "non-finite value in stage " + std::to_string(stage);
    if (step != npos) msg += " at step " + std::to_string(step);
    return msg;
  }

  std::size_t stage_;
  std::size_t step_;
};

}  // namespace expint
