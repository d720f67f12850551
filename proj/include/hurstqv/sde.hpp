#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hurstqv/errors.hpp"
#include "hurstqv/fgn.hpp"
#include "hurstqv/sample_path.hpp"

namespace hurstqv {

/// dX = f(X) dt + g(X) dB^H with X_0 = x0. f, g, g' are pure scalar functions;
/// registry entries satisfy the Lipschitz/C^1 assumptions.
struct ProcessSpec {
  std::string name;
  std::function<double(double)> drift;
  std::function<double(double)> diffusion;
  std::function<double(double)> diffusion_deriv;
  double x0 = 0.0;
};

/// Registered test processes on [0, T]:
///   I:  dX = sin(X) dt + cos(X) dB^H,      X_0 = 1
///   II: dX = sin(X) dt + (2+cos(X)) dB^H,  X_0 = 1
inline const ProcessSpec& process_registry(const std::string& name) {
  static const ProcessSpec process_1{
      "I", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
      [](double x) { return -std::sin(x); }, 1.0};
  static const ProcessSpec process_2{
      "II", [](double x) { return std::sin(x); }, [](double x) { return 2.0 + std::cos(x); },
      [](double x) { return -std::sin(x); }, 1.0};
  if (name == "I") return process_1;
  if (name == "II") return process_2;
  throw DomainError("process_registry: unknown process '" + name + "' (registered: I, II)");
}

inline std::vector<std::string> registered_processes() { return {"I", "II"}; }

/// Milstein recursion driven by a supplied B^H path:
///   X_{j+1} = X_j + f(X_j) dt + g(X_j) dB_j + (1/2) g(X_j) g'(X_j) dB_j^2.
inline SamplePath simulate_with_driver(const ProcessSpec& spec, const SamplePath& driver) {
  const std::size_t m = driver.steps();
  if (m < 4) throw DomainError("simulate_with_driver: driver grid must have at least 4 steps");
  const double dt = driver.horizon / static_cast<double>(m);
  std::vector<double> x(m + 1);
  x[0] = spec.x0;
  for (std::size_t j = 0; j < m; ++j) {
    const double db = driver.values[j + 1] - driver.values[j];
    const double xj = x[j];
    const double gx = spec.diffusion(xj);
    x[j + 1] = xj + spec.drift(xj) * dt + gx * db +
               0.5 * gx * spec.diffusion_deriv(xj) * db * db;
    if (!std::isfinite(x[j + 1]))
      throw SimulationError("simulate_with_driver: non-finite state", j + 1);
  }
  return SamplePath(driver.horizon, std::move(x));
}

struct SdeResult {
  SamplePath path;
  SamplePath driver;  ///< the B^H path that drove the recursion
};

/// Simulates the SDE on a fresh fBm driver; identical to
/// simulate_with_driver(spec, fbm_path(m, T, H, seed)).
inline SdeResult simulate(const ProcessSpec& spec, std::size_t m, double horizon, double hurst,
                          std::uint64_t seed) {
  if (m < 4) throw DomainError("simulate: need m >= 4");
  if (!(hurst > 0.5 && hurst < 1.0))
    throw DomainError("simulate: hurst must lie in (1/2,1) for the SDE pipeline");
  SamplePath driver = fbm_path(m, horizon, hurst, seed);
  SamplePath path = simulate_with_driver(spec, driver);
  return SdeResult{std::move(path), std::move(driver)};
}

}  // namespace hurstqv
