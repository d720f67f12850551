#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hurstqv {

/// Base class for all library errors. `code()` is a stable, machine-parsable
/// identifier; `what()` is the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Precondition violation (bad argument, mismatched grid, invalid parameter).
struct DomainError : Error {
  explicit DomainError(const std::string& message) : Error("domain-error", message) {}
};

/// Circulant embedding produced a materially negative eigenvalue.
struct SynthesisError : Error {
  explicit SynthesisError(const std::string& message) : Error("synthesis-error", message) {}
};

/// Dense covariance factorization failed (numerically non-PSD matrix).
struct FactorizationError : Error {
  explicit FactorizationError(const std::string& message) : Error("factorization-error", message) {}
};

/// SDE state became non-finite; carries the offending step index.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& message, std::size_t step)
      : Error("simulation-error", message + " (step " + std::to_string(step) + ")"),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Window statistics degenerate (zero window or zero mean where positivity is required).
struct DegeneratePathError : Error {
  explicit DegeneratePathError(const std::string& message) : Error("degenerate-path", message) {}
};

/// Value outside an invertible/admissible range; carries the admissible interval.
class RangeError : public Error {
 public:
  RangeError(const std::string& message, double lo, double hi)
      : Error("range-error", message + " (admissible interval (" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "))"),
        lo_(lo), hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Diffusion coefficient too close to zero along the observed path.
struct NearZeroDiffusionError : Error {
  explicit NearZeroDiffusionError(const std::string& message)
      : Error("near-zero-diffusion", message) {}
};

/// Numeric failure that signals a bug upstream (NaN input, non-convergence).
struct NumericError : Error {
  explicit NumericError(const std::string& message) : Error("numeric-error", message) {}
};

struct IoError : Error {
  explicit IoError(const std::string& message) : Error("io-error", message) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& message) : Error("config-error", message) {}
};

}  // namespace hurstqv
