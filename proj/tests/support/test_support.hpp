#pragma once

// Shared test utilities: brute-force covariance oracles computed straight from
// the fBm covariance function (independent of the library's closed forms),
// simple sample statistics, a two-sample Kolmogorov-Smirnov test, an Euler
// scheme used as a comparison oracle, and a log-log slope fit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hurstqv/fgn.hpp"
#include "hurstqv/sample_path.hpp"
#include "hurstqv/sde.hpp"

namespace test_support {

// Cov(D2 B_{i/n}, D2 B_{j/n}) expanded term by term over the fBm covariance.
inline double brute_second_increment_cov(std::size_t i, std::size_t j, std::size_t n,
                                         double hurst) {
  static const double w[3] = {1.0, -2.0, 1.0};
  double total = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double s = static_cast<double>(i - a) / static_cast<double>(n);
      const double t = static_cast<double>(j - b) / static_cast<double>(n);
      total += w[a] * w[b] * hurstqv::fbm_covariance(s, t, hurst);
    }
  return total;
}

// kappa(l) of the nested-grid cross-covariance: Cov(D2 B_{i/n}, D2 B_{j/2n})
// = (2n)^{-2H} kappa(2i - j), expanded over |.|^{2H} terms.
inline double nested_cross_kappa(long l, double hurst) {
  static const double w[3] = {1.0, -2.0, 1.0};
  double total = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      total += w[a] * w[b] * -0.5 *
               std::pow(std::abs(static_cast<double>(l - 2 * a + b)), 2.0 * hurst);
  return total;
}

// Exact n * Cov(V~_{n,1}, V~_{2n,1}) for fBm; converges to sigma_star2.
inline double nested_cov_oracle(std::size_t n, double hurst) {
  const double nd = static_cast<double>(n);
  const double denom = 4.0 - std::pow(2.0, 2.0 * hurst);
  const double a_n = std::pow(nd, 2.0 * hurst - 1.0) / denom;
  const double a_2n = std::pow(2.0 * nd, 2.0 * hurst - 1.0) / denom;
  double sum = 0.0;
  const long lo = 4 - 2 * static_cast<long>(n);
  const long hi = 2 * static_cast<long>(n) - 2;
  for (long l = lo; l <= hi; ++l) {
    // count of (i,j) with 2i - j = l, i in [2,n], j in [2,2n]
    const long i_min = std::max<long>(2, (l + 3) / 2);  // ceil((l+2)/2)
    const long i_max = std::min<long>(static_cast<long>(n), (l + 2 * static_cast<long>(n)) / 2);
    if (i_max < i_min) continue;
    const double count = static_cast<double>(i_max - i_min + 1);
    const double k = nested_cross_kappa(l, hurst);
    sum += count * k * k;
  }
  return nd * a_n * a_2n * 2.0 * std::pow(2.0 * nd, -4.0 * hurst) * sum;
}

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sample_variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Lag autocovariance about the known zero mean (fGn samples are centered).
inline double autocov_zero_mean(std::span<const double> x, std::size_t lag) {
  double s = 0.0;
  for (std::size_t i = lag; i < x.size(); ++i) s += x[i] * x[i - lag];
  return s / static_cast<double>(x.size() - lag);
}

inline double median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

// Asymptotic Kolmogorov distribution complement Q(lambda).
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-10) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-14) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

// Two-sample KS test p-value (asymptotic, with the usual small-sample factor).
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] <= b[ib])
      ++ia;
    else
      ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  return kolmogorov_q((en + 0.12 + 0.11 / en) * d);
}

// Euler scheme (no Milstein correction); comparison oracle only.
inline hurstqv::SamplePath euler_with_driver(const hurstqv::ProcessSpec& spec,
                                             const hurstqv::SamplePath& driver) {
  const std::size_t m = driver.steps();
  const double dt = driver.horizon / static_cast<double>(m);
  std::vector<double> x(m + 1);
  x[0] = spec.x0;
  for (std::size_t j = 0; j < m; ++j) {
    const double db = driver.values[j + 1] - driver.values[j];
    x[j + 1] = x[j] + spec.drift(x[j]) * dt + spec.diffusion(x[j]) * db;
  }
  return hurstqv::SamplePath(driver.horizon, std::move(x));
}

// Least-squares slope of log|y| against log x.
inline double log_log_slope(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(std::abs(ys[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double nd = static_cast<double>(n);
  return (nd * sxy - sx * sy) / (nd * sxx - sx * sx);
}

}  // namespace test_support
