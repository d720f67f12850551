#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>

#include "hurstqv/errors.hpp"
#include "hurstqv/quad_var.hpp"
#include "hurstqv/sample_path.hpp"
#include "hurstqv/variance.hpp"

namespace hurstqv {

enum class EstimatorId { known_g, h1, h2, h3, h4 };

inline std::string to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::known_g: return "known_g";
    case EstimatorId::h1: return "h1";
    case EstimatorId::h2: return "h2";
    case EstimatorId::h3: return "h3";
    default: return "h4";
  }
}

inline EstimatorId estimator_from_string(const std::string& s) {
  if (s == "known_g") return EstimatorId::known_g;
  if (s == "h1") return EstimatorId::h1;
  if (s == "h2") return EstimatorId::h2;
  if (s == "h3") return EstimatorId::h3;
  if (s == "h4") return EstimatorId::h4;
  throw DomainError("unknown estimator id '" + s + "'");
}

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
};

struct HurstEstimate {
  double h_hat = 0.0;
  EstimatorId estimator_id = EstimatorId::known_g;
  std::size_t effective_n = 0;  ///< n for known_g, k_n for h1..h4
  std::optional<double> std_error;
  std::optional<ConfidenceInterval> ci;
  std::optional<std::size_t> selected_k;  ///< chosen window offset, h1..h4 only
};

/// phi_{n,T}(x) = (T/n)^{2x} (4 - 2^{2x}); strictly decreasing in x for n > T.
inline double phi(std::size_t n, double horizon, double x) {
  if (!(static_cast<double>(n) > horizon))
    throw DomainError("phi: requires n > T for monotonicity");
  if (!(x > 0.0 && x < 1.0)) throw DomainError("phi: x must lie in (0,1)");
  return std::pow(horizon / static_cast<double>(n), 2.0 * x) * (4.0 - std::pow(2.0, 2.0 * x));
}

namespace detail {
inline constexpr double kPhiEdge = 1e-6;  // inversion interval is [edge, 1-edge]
}

/// Inverts phi_{n,T} by bisection on [1e-6, 1-1e-6] to relative residual 1e-13
/// or interval width 1e-13.
inline double phi_inverse(std::size_t n, double horizon, double y) {
  double lo = detail::kPhiEdge;
  double hi = 1.0 - detail::kPhiEdge;
  const double f_lo = phi(n, horizon, lo);   // largest value
  const double f_hi = phi(n, horizon, hi);   // smallest value
  if (!(y > f_hi && y < f_lo))
    throw RangeError("phi_inverse: statistic " + std::to_string(y) + " not invertible", f_hi,
                     f_lo);
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = phi(n, horizon, mid);
    if (std::abs(f_mid - y) <= 1e-13 * std::abs(y) || hi - lo <= 1e-13) return mid;
    if (f_mid > y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Standard normal quantile by bisection on the erfc-based CDF; |error| well
/// below 1e-12 for p away from {0,1}.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
  auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  double lo = -40.0, hi = 40.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14) break;
  }
  return 0.5 * (lo + hi);
}

namespace detail {

/// Plug-in estimates can land outside (1/2,1) under noise; the variance series
/// is evaluated at the nearest interior point.
inline double clamp_plugin_hurst(double h) { return std::clamp(h, 0.501, 0.999); }

}  // namespace detail

/// H_n(k) = 1/2 - ln(w1[k]/w2[k]) / (2 ln 2); k is the 1-based offset. The raw
/// value is reported unclamped.
inline double estimate_hn(const WindowStats& stats, std::size_t k) {
  if (k < 1 || k > stats.w1.size())
    throw DomainError("estimate_hn: offset k out of range");
  const double w1 = stats.w1[k - 1];
  const double w2 = stats.w2[k - 1];
  if (!(w1 > 0.0) || !(w2 > 0.0))
    throw DegeneratePathError("estimate_hn: non-positive window statistic at offset " +
                              std::to_string(k));
  return 0.5 - std::log(w1 / w2) / (2.0 * std::numbers::ln2);
}

/// Known-diffusion estimator: inverts phi_{n,T} at
/// S = (1/n) sum_{i=2}^{n} (D2 X_{iT/n} / g(X_{(i-1)T/n}))^2.
/// std_error uses the CLT rate 2 sqrt(n) ln(n/T) with plug-in sigma.
inline HurstEstimate estimate_known_g(const SamplePath& path,
                                      const std::function<double(double)>& g,
                                      double ci_level = 0.95) {
  const std::size_t n = path.steps();
  if (!(static_cast<double>(n) > path.horizon))
    throw DomainError("estimate_known_g: requires n > T");
  double sum = 0.0;
  for (std::size_t i = 2; i <= n; ++i) {
    const double gv = g(path.values[i - 1]);
    if (std::abs(gv) < 1e-12)
      throw NearZeroDiffusionError("estimate_known_g: |g(X)| < 1e-12 at grid index " +
                                   std::to_string(i - 1));
    const double d = path.values[i] - 2.0 * path.values[i - 1] + path.values[i - 2];
    const double q = d / gv;
    sum += q * q;
  }
  const double statistic = sum / static_cast<double>(n);
  HurstEstimate est;
  est.estimator_id = EstimatorId::known_g;
  est.effective_n = n;
  est.h_hat = phi_inverse(n, path.horizon, statistic);

  const VarianceConstants vc = variance_constants(detail::clamp_plugin_hurst(est.h_hat));
  const double rate = 2.0 * std::sqrt(static_cast<double>(n)) *
                      std::log(static_cast<double>(n) / path.horizon);
  const double se = std::sqrt(vc.sigma2) / rate;
  est.std_error = se;
  const double z = normal_quantile(0.5 + 0.5 * ci_level);
  est.ci = ConfidenceInterval{est.h_hat - z * se, est.h_hat + z * se, ci_level};
  return est;
}

/// Localization estimator: window statistics, selector i_n^{(method)}, then
/// H_n at the chosen offset. std_error uses the rate 2 ln2 sqrt(k_n) with
/// plug-in sigma_H.
inline HurstEstimate estimate_localized(const SamplePath& path, const GridDesign& design,
                                        int method, double ci_level = 0.95) {
  const WindowStats stats = window_stats(path, design);
  const std::size_t k = select_index(stats, method);
  HurstEstimate est;
  est.estimator_id = method == 1   ? EstimatorId::h1
                     : method == 2 ? EstimatorId::h2
                     : method == 3 ? EstimatorId::h3
                                   : EstimatorId::h4;
  est.effective_n = design.k_n;
  est.selected_k = k;
  est.h_hat = estimate_hn(stats, k);

  const VarianceConstants vc = variance_constants(detail::clamp_plugin_hurst(est.h_hat));
  const double rate = 2.0 * std::numbers::ln2 * std::sqrt(static_cast<double>(design.k_n));
  const double se = std::sqrt(vc.sigma_H2) / rate;
  est.std_error = se;
  const double z = normal_quantile(0.5 + 0.5 * ci_level);
  est.ci = ConfidenceInterval{est.h_hat - z * se, est.h_hat + z * se, ci_level};
  return est;
}

}  // namespace hurstqv
