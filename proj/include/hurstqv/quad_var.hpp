#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hurstqv/errors.hpp"
#include "hurstqv/sample_path.hpp"

namespace hurstqv {

enum class PhiMode { const_one, log_power };

/// Sampling design for the localization estimators: outer offsets k/n, window
/// half-width k_n, full grid m_n = n * k_n.
struct GridDesign {
  std::size_t n = 0;
  std::size_t k_n = 0;
  std::size_t m_n = 0;
  std::optional<double> beta;                ///< lower bound on H, in [1/2, 1), if known
  PhiMode phi_mode = PhiMode::const_one;
  double alpha = 1.0;                        ///< exponent for log_power

  /// k_n = floor(n^{2 beta} phi(n)) when beta is known, else floor(n phi(n));
  /// phi(n) = 1 or ln^alpha(n). Defaults give k_n = n, m_n = n^2.
  static GridDesign make(std::size_t n, std::optional<double> beta = std::nullopt,
                         PhiMode phi_mode = PhiMode::const_one, double alpha = 1.0) {
    if (n < 2) throw DomainError("GridDesign: need n >= 2");
    if (beta && !(*beta >= 0.5 && *beta < 1.0))
      throw DomainError("GridDesign: beta must lie in [1/2, 1)");
    if (phi_mode == PhiMode::log_power && !(alpha > 0.0))
      throw DomainError("GridDesign: log_power needs alpha > 0");
    const double nd = static_cast<double>(n);
    const double phi = phi_mode == PhiMode::const_one ? 1.0 : std::pow(std::log(nd), alpha);
    const double kd = beta ? std::floor(std::pow(nd, 2.0 * (*beta)) * phi) : std::floor(nd * phi);
    GridDesign d;
    d.n = n;
    d.k_n = static_cast<std::size_t>(kd);
    d.beta = beta;
    d.phi_mode = phi_mode;
    d.alpha = alpha;
    d.finish();
    return d;
  }

  /// Explicit (n, k_n), e.g. when estimating from a file whose length fixes both.
  static GridDesign from_counts(std::size_t n, std::size_t k_n) {
    if (n < 2) throw DomainError("GridDesign: need n >= 2");
    GridDesign d;
    d.n = n;
    d.k_n = k_n;
    d.finish();
    return d;
  }

 private:
  void finish() {
    if (k_n < 5) throw DomainError("GridDesign: k_n must be >= 5, got " + std::to_string(k_n));
    m_n = n * k_n;
  }
};

/// out[i] = x[i] - 2 x[i-lag] + x[i-2 lag] for i = 2 lag .. len-1.
inline std::vector<double> second_diff(std::span<const double> x, std::size_t lag) {
  if (lag == 0) throw DomainError("second_diff: lag must be positive");
  if (x.size() < 2 * lag + 1)
    throw DomainError("second_diff: need at least 2*lag+1 points, got " +
                      std::to_string(x.size()));
  std::vector<double> out(x.size() - 2 * lag);
  for (std::size_t i = 2 * lag; i < x.size(); ++i)
    out[i - 2 * lag] = x[i] - 2.0 * x[i - lag] + x[i - 2 * lag];
  return out;
}

/// Normalized second-order quadratic variation
/// (n^{2H-1}/(4-2^{2H})) sum_{i=2}^{n} (T^{-H} D2 X_{iT/n})^2; equals (n-1)/n
/// in expectation for exact fBm input.
inline double v_tilde(const SamplePath& path, double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("v_tilde: hurst must lie in (0,1)");
  const std::size_t n = path.steps();
  if (n < 3) throw DomainError("v_tilde: need at least 3 steps");
  const double t_scale = std::pow(path.horizon, -hurst);
  double sum = 0.0;
  for (std::size_t i = 2; i <= n; ++i) {
    const double d = path.values[i] - 2.0 * path.values[i - 1] + path.values[i - 2];
    const double s = t_scale * d;
    sum += s * s;
  }
  const double nd = static_cast<double>(n);
  return std::pow(nd, 2.0 * hurst - 1.0) / (4.0 - std::pow(2.0, 2.0 * hurst)) * sum;
}

/// Per-offset sums of squared lag-1 / lag-2 second differences. Arrays are
/// indexed by offset k = 1..n-1 (w1[k-1] stores offset k).
struct WindowStats {
  std::size_t n = 0;
  std::size_t k_n = 0;
  std::vector<double> w1;
  std::vector<double> w2;
  double w1_mean = 0.0;
  double w2_mean = 0.0;
};

/// For each offset k the window is centered at grid index c = k*k_n:
///   w1[k] = sum_{j=-k_n+2}^{k_n} (x[c+j] - 2x[c+j-1] + x[c+j-2])^2   (2 k_n - 1 terms)
///   w2[k] = sum over j in {-k_n+4, -k_n+6, ..., k_n} of
///           (x[c+j] - 2x[c+j-2] + x[c+j-4])^2                        (k_n - 1 terms)
/// Terms are accumulated in ascending j.
inline WindowStats window_stats(const SamplePath& path, const GridDesign& design) {
  if (path.steps() != design.m_n)
    throw DomainError("window_stats: path has " + std::to_string(path.steps()) +
                      " steps, design expects m_n = " + std::to_string(design.m_n));
  const std::size_t n = design.n;
  const std::size_t kn = design.k_n;
  const std::vector<double>& x = path.values;

  WindowStats stats;
  stats.n = n;
  stats.k_n = kn;
  stats.w1.resize(n - 1);
  stats.w2.resize(n - 1);
  const long half = static_cast<long>(kn);
  for (std::size_t k = 1; k < n; ++k) {
    const long c = static_cast<long>(k * kn);
    double s1 = 0.0;
    for (long j = -half + 2; j <= half; ++j) {
      const double d = x[c + j] - 2.0 * x[c + j - 1] + x[c + j - 2];
      s1 += d * d;
    }
    double s2 = 0.0;
    for (long j = -half + 4; j <= half; j += 2) {
      const double d = x[c + j] - 2.0 * x[c + j - 2] + x[c + j - 4];
      s2 += d * d;
    }
    stats.w1[k - 1] = s1;
    stats.w2[k - 1] = s2;
  }
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    m1 += stats.w1[k];
    m2 += stats.w2[k];
  }
  stats.w1_mean = m1 / static_cast<double>(n - 1);
  stats.w2_mean = m2 / static_cast<double>(n - 1);
  return stats;
}

/// Data-driven window selectors; returns the chosen offset k in {1..n-1},
/// ties resolved to the smallest k. NaN entries signal an upstream bug.
inline std::size_t select_index(const WindowStats& stats, int method) {
  if (method < 1 || method > 4) throw DomainError("select_index: method must be 1..4");
  const std::size_t count = stats.w1.size();
  if (count == 0 || stats.w2.size() != count)
    throw DomainError("select_index: empty or mismatched window arrays");
  for (std::size_t k = 0; k < count; ++k)
    if (std::isnan(stats.w1[k]) || std::isnan(stats.w2[k]))
      throw NumericError("select_index: NaN window statistic at offset " + std::to_string(k + 1));
  if (method >= 2 && (stats.w1_mean == 0.0 || stats.w2_mean == 0.0))
    throw DegeneratePathError("select_index: zero mean window statistic");

  std::size_t best = 0;
  if (method == 1) {
    for (std::size_t k = 1; k < count; ++k)
      if (stats.w1[k] > stats.w1[best]) best = k;
    return best + 1;
  }
  auto score = [&](std::size_t k) {
    switch (method) {
      case 2:
        return std::abs(stats.w1[k] / stats.w1_mean - 1.0);
      case 3:
        return std::abs(stats.w1[k] / stats.w1_mean - 1.0) +
               std::abs(stats.w2[k] / stats.w2_mean - 1.0);
      default:  // 4
        return std::abs(stats.w1_mean - stats.w1[k]) / stats.w2_mean +
               std::abs(stats.w2_mean - stats.w2[k]) / stats.w1_mean;
    }
  };
  double best_score = score(0);
  for (std::size_t k = 1; k < count; ++k) {
    const double s = score(k);
    if (s < best_score) {
      best_score = s;
      best = k;
    }
  }
  return best + 1;
}

}  // namespace hurstqv
