#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "hurstqv/errors.hpp"
#include "hurstqv/log.hpp"
#include "hurstqv/rng.hpp"
#include "hurstqv/sample_path.hpp"

namespace hurstqv {

namespace detail {

inline void require_hurst_open01(double hurst, const char* where) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw DomainError(std::string(where) + ": hurst must lie in (0,1), got " +
                      std::to_string(hurst));
}

}  // namespace detail

/// Autocovariance of unit-variance fGn at unit spacing:
/// gamma(k) = 1/2 (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}).
inline double fgn_autocovariance(long lag, double hurst) {
  detail::require_hurst_open01(hurst, "fgn_autocovariance");
  const double k = std::abs(static_cast<double>(lag));
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, e) - 2.0 * std::pow(k, e) + std::pow(std::abs(k - 1.0), e));
}

/// fBm covariance 1/2 (s^{2H} + t^{2H} - |t-s|^{2H}) for s,t >= 0.
inline double fbm_covariance(double s, double t, double hurst) {
  detail::require_hurst_open01(hurst, "fbm_covariance");
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(s), e) + std::pow(std::abs(t), e) -
                std::pow(std::abs(t - s), e));
}

namespace detail {

/// Unit-grid covariance of lag-1 second-order fBm increments at offset l:
/// Cov(D2B_i, D2B_{i+l}) with spacing 1. Stationary in l.
inline double second_increment_autocov_unit(long l, double hurst) {
  const double a = std::abs(static_cast<double>(l));
  const double e = 2.0 * hurst;
  const double num = std::pow(std::abs(a - 2.0), e) - 4.0 * std::pow(std::abs(a - 1.0), e) +
                     6.0 * std::pow(a, e) - 4.0 * std::pow(a + 1.0, e) +
                     std::pow(a + 2.0, e);
  return -0.5 * num;
}

}  // namespace detail

/// Cov(D2 B^H_{i/n}, D2 B^H_{j/n}) for the grid {0, 1/n, ..., 1}; second-order
/// increments are stationary, so only |i-j| and n enter. Diagonal entries are
/// (4 - 2^{2H}) n^{-2H}.
inline double second_increment_cov(std::size_t i, std::size_t j, std::size_t n, double hurst) {
  detail::require_hurst_open01(hurst, "second_increment_cov");
  if (i < 2 || j < 2 || i > n || j > n)
    throw DomainError("second_increment_cov: indices must satisfy 2 <= i,j <= n");
  const long l = static_cast<long>(i) - static_cast<long>(j);
  return detail::second_increment_autocov_unit(l, hurst) *
         std::pow(static_cast<double>(n), -2.0 * hurst);
}

/// Trace and Frobenius moments of the (n-1)x(n-1) second-increment covariance
/// matrix, accumulated from its Toeplitz structure in O(n).
struct EigenSums {
  double sum = 0.0;          ///< sum of eigenvalues (= trace)
  double sum_squares = 0.0;  ///< sum of squared eigenvalues (= squared Frobenius norm)
};

inline EigenSums second_increment_eigen_sums(std::size_t n, double hurst) {
  detail::require_hurst_open01(hurst, "second_increment_eigen_sums");
  if (n < 2) throw DomainError("second_increment_eigen_sums: need n >= 2");
  const std::size_t N = n - 1;
  EigenSums out;
  out.sum = static_cast<double>(N) * second_increment_cov(2, 2, n, hurst);
  for (std::size_t l = 0; l < N; ++l) {
    const double c = second_increment_cov(2 + l, 2, n, hurst);
    const double w = (l == 0) ? static_cast<double>(N) : 2.0 * static_cast<double>(N - l);
    out.sum_squares += w * c * c;
  }
  return out;
}

struct EigenvalueMoments {
  double sum = 0.0;
  double sum_squares = 0.0;
  double max = 0.0;  ///< largest eigenvalue (dense symmetric solve)
};

/// Eigenvalue moments of the second-increment covariance matrix. sum and
/// sum_squares come from exact trace identities; max requires a dense
/// eigen-solve, hence the n <= 4096 guard.
inline EigenvalueMoments eigen_moment_stats(std::size_t n, double hurst) {
  if (n > 4096) throw DomainError("eigen_moment_stats: n must be <= 4096 (dense eigen-solve)");
  const EigenSums sums = second_increment_eigen_sums(n, hurst);
  const std::size_t N = n - 1;
  Eigen::MatrixXd cov(N, N);
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = 0; c <= r; ++c) {
      const double v = second_increment_cov(2 + r, 2 + c, n, hurst);
      cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      cov(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigen_moment_stats: eigenvalue solve failed");
  return EigenvalueMoments{sums.sum, sums.sum_squares, solver.eigenvalues().maxCoeff()};
}

namespace detail {

inline std::size_t embedding_size(std::size_t n) {
  const std::size_t minimal = 2 * (n - 1);
  std::size_t m = 2;
  while (m < minimal) m *= 2;
  return m;
}

/// Eigenvalues of the circulant embedding of gamma(0..M/2) for size M.
/// Cached per thread for the most recent (n, hurst) pair; replications of one
/// Monte-Carlo cell reuse the same embedding.
inline const std::vector<double>& circulant_eigenvalues(std::size_t n, double hurst) {
  struct Cache {
    std::size_t n = 0;
    double hurst = -1.0;
    std::vector<double> lambda;
  };
  thread_local Cache cache;
  thread_local Eigen::FFT<double> fft;
  if (cache.n == n && cache.hurst == hurst) return cache.lambda;

  const std::size_t m = embedding_size(n);
  const std::size_t half = m / 2;
  std::vector<std::complex<double>> row(m);
  for (std::size_t j = 0; j <= half; ++j)
    row[j] = fgn_autocovariance(static_cast<long>(j), hurst);
  for (std::size_t j = half + 1; j < m; ++j) row[j] = row[m - j];

  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, row);

  std::vector<double> lambda(m);
  double lambda_max = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    lambda[k] = spectrum[k].real();
    lambda_max = std::max(lambda_max, lambda[k]);
  }
  const double tolerance = -1e-10 * lambda_max;
  for (std::size_t k = 0; k < m; ++k) {
    if (lambda[k] < tolerance)
      throw SynthesisError("generate_fgn: circulant eigenvalue " + std::to_string(lambda[k]) +
                           " below tolerance for H=" + std::to_string(hurst) +
                           ", n=" + std::to_string(n));
    if (lambda[k] < 0.0) lambda[k] = 0.0;
  }
  log_debug("circulant embedding: n=" + std::to_string(n) + " M=" + std::to_string(m) +
            " lambda_max=" + std::to_string(lambda_max));
  cache.n = n;
  cache.hurst = hurst;
  cache.lambda = std::move(lambda);
  return cache.lambda;
}

}  // namespace detail

/// Exact synthesis of n unit-variance fGn increments via circulant embedding
/// (Wood-Chan), embedding size = 2(n-1) rounded up to a power of two so the
/// first n covariances are preserved exactly. Deterministic per (n, H, seed).
inline FgnSample generate_fgn(std::size_t n, double hurst, std::uint64_t seed) {
  detail::require_hurst_open01(hurst, "generate_fgn");
  if (n < 2) throw DomainError("generate_fgn: need n >= 2");

  const std::vector<double>& lambda = detail::circulant_eigenvalues(n, hurst);
  const std::size_t m = lambda.size();
  const double inv_m = 1.0 / static_cast<double>(m);

  GaussianStream gauss(seed);
  std::vector<std::complex<double>> z(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = std::sqrt(lambda[k] * inv_m);
    const double re = gauss.next();
    const double im = gauss.next();
    z[k] = {a * re, a * im};
  }

  thread_local Eigen::FFT<double> fft;
  std::vector<std::complex<double>> y;
  fft.fwd(y, z);

  FgnSample out;
  out.hurst = hurst;
  out.n = n;
  out.spacing = 1.0;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = y[i].real();
  return out;
}

/// Exact-covariance reference generator via dense Cholesky factorization of
/// the fGn covariance matrix. O(n^3); guarded to n <= 2048.
inline FgnSample cholesky_fgn_oracle(std::size_t n, double hurst, std::uint64_t seed) {
  detail::require_hurst_open01(hurst, "cholesky_fgn_oracle");
  if (n < 1 || n > 2048) throw DomainError("cholesky_fgn_oracle: need 1 <= n <= 2048");

  Eigen::MatrixXd cov(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c <= r; ++c) {
      const double v = fgn_autocovariance(static_cast<long>(r) - static_cast<long>(c), hurst);
      cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      cov(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
    }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw FactorizationError("cholesky_fgn_oracle: covariance matrix not positive definite (H=" +
                             std::to_string(hurst) + ", n=" + std::to_string(n) + ")");

  GaussianStream gauss(seed);
  Eigen::VectorXd z(n);
  for (std::size_t i = 0; i < n; ++i) z(static_cast<Eigen::Index>(i)) = gauss.next();
  const Eigen::VectorXd x = llt.matrixL() * z;

  FgnSample out;
  out.hurst = hurst;
  out.n = n;
  out.spacing = 1.0;
  out.values.assign(x.data(), x.data() + n);
  return out;
}

/// fBm path on [0, T] with m steps: cumulative sum of generate_fgn scaled by
/// (T/m)^H; values[0] = 0 and Var X(t_j) = t_j^{2H}.
inline SamplePath fbm_path(std::size_t m, double horizon, double hurst, std::uint64_t seed) {
  if (m < 4) throw DomainError("fbm_path: need m >= 4");
  if (horizon <= 0.0) throw DomainError("fbm_path: horizon must be positive");
  const FgnSample inc = generate_fgn(m, hurst, seed);
  const double scale = std::pow(horizon / static_cast<double>(m), hurst);
  std::vector<double> values(m + 1);
  values[0] = 0.0;
  for (std::size_t j = 0; j < m; ++j) values[j + 1] = values[j] + scale * inc.values[j];
  return SamplePath(horizon, std::move(values));
}

}  // namespace hurstqv
