#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include <Eigen/Dense>

#include "hurstqv/fgn.hpp"
#include "support/test_support.hpp"

using namespace hurstqv;
using Catch::Approx;

TEST_CASE("fgn_autocovariance pinned values") {
  CHECK(fgn_autocovariance(0, 0.7) == 1.0);
  CHECK(fgn_autocovariance(1, 0.5) == 0.0);
  CHECK(fgn_autocovariance(1, 0.75) == Approx(0.5 * (std::pow(2.0, 1.5) - 2.0)).epsilon(1e-14));
  // cross-check against E[B_1 (B_2 - B_1)] from the fBm covariance
  const double brute = fbm_covariance(1.0, 2.0, 0.75) - fbm_covariance(1.0, 1.0, 0.75);
  CHECK(fgn_autocovariance(1, 0.75) == Approx(brute).epsilon(1e-13));
  CHECK(fgn_autocovariance(-3, 0.8) == fgn_autocovariance(3, 0.8));
  CHECK_THROWS_AS(fgn_autocovariance(1, 0.0), DomainError);
  CHECK_THROWS_AS(fgn_autocovariance(1, 1.0), DomainError);
}

TEST_CASE("second_increment_cov diagonal and independence at H=1/2") {
  for (double h : {0.55, 0.7, 0.9}) {
    for (std::size_t n : {8u, 100u}) {
      const double expected = (4.0 - std::pow(2.0, 2.0 * h)) * std::pow(double(n), -2.0 * h);
      CHECK(second_increment_cov(5, 5, n, h) == Approx(expected).epsilon(1e-13));
    }
  }
  CHECK(second_increment_cov(2, 4, 4, 0.5) == 0.0);
  CHECK_THROWS_AS(second_increment_cov(1, 3, 8, 0.7), DomainError);
  CHECK_THROWS_AS(second_increment_cov(2, 9, 8, 0.7), DomainError);
}

TEST_CASE("second_increment_cov matches brute expansion over fBm covariance") {
  CHECK(second_increment_cov(2, 3, 8, 0.8) ==
        Approx(test_support::brute_second_increment_cov(2, 3, 8, 0.8)).margin(1e-15));
  for (double h : {0.55, 0.75, 0.95})
    for (std::size_t i : {2u, 3u, 5u, 8u})
      for (std::size_t j : {2u, 4u, 8u})
        CHECK(second_increment_cov(i, j, 8, h) ==
              Approx(test_support::brute_second_increment_cov(i, j, 8, h)).margin(1e-14));
}

TEST_CASE("eigen sums equal dense eigenvalue sums") {
  for (double h : {0.6, 0.9}) {
    const std::size_t n = 32;
    const std::size_t N = n - 1;
    Eigen::MatrixXd cov(N, N);
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c)
        cov(r, c) = second_increment_cov(2 + r, 2 + c, n, h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues();
    const EigenvalueMoments m = eigen_moment_stats(n, h);
    CHECK(m.sum == Approx(ev.sum()).epsilon(1e-12));
    CHECK(m.sum_squares == Approx(ev.array().square().sum()).epsilon(1e-12));
    CHECK(m.max == Approx(ev.maxCoeff()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(eigen_moment_stats(4097, 0.7), DomainError);
}

TEST_CASE("trace identity") {
  CHECK(second_increment_eigen_sums(100, 0.7).sum ==
        Approx(99.0 * (4.0 - std::pow(2.0, 1.4)) / std::pow(100.0, 1.4)).epsilon(1e-10));
  for (double h : {0.55, 0.65, 0.75, 0.85, 0.95})
    for (std::size_t n : {64u, 512u}) {
      const double expected =
          double(n - 1) * (4.0 - std::pow(2.0, 2.0 * h)) / std::pow(double(n), 2.0 * h);
      CHECK(second_increment_eigen_sums(n, h).sum == Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("largest eigenvalue scales like n^{-2H}") {
  const double h = 0.7;
  const double r = eigen_moment_stats(1024, h).max / eigen_moment_stats(512, h).max;
  const double target = std::pow(2.0, -2.0 * h);
  CHECK(r > 0.9 * target);
  CHECK(r < 1.1 * target);
}

TEST_CASE("generate_fgn is white noise at H=1/2") {
  const FgnSample s = generate_fgn(4096, 0.5, 2024);
  const double c0 = test_support::autocov_zero_mean(s.values, 0);
  const double c1 = test_support::autocov_zero_mean(s.values, 1);
  CHECK(std::abs(c1 / c0) < 0.05);
}

TEST_CASE("generate_fgn sample autocovariance matches the closed form") {
  const double h = 0.75;
  const std::size_t n = 4096;
  std::vector<double> acc(6, 0.0);
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const FgnSample sample = generate_fgn(n, h, 5000 + s);
    for (std::size_t lag = 0; lag < acc.size(); ++lag)
      acc[lag] += test_support::autocov_zero_mean(sample.values, lag);
  }
  for (std::size_t lag = 0; lag < acc.size(); ++lag) {
    const double observed = acc[lag] / seeds;
    CHECK(observed == Approx(fgn_autocovariance(long(lag), h)).margin(0.05));
  }
}

TEST_CASE("generate_fgn agrees with the Cholesky oracle in distribution") {
  auto pooled = [](std::size_t n, double h, bool circulant, int seeds, std::uint64_t base) {
    std::vector<double> out;
    out.reserve(n * seeds);
    for (int s = 0; s < seeds; ++s) {
      const FgnSample sample =
          circulant ? generate_fgn(n, h, base + s) : cholesky_fgn_oracle(n, h, base + s);
      out.insert(out.end(), sample.values.begin(), sample.values.end());
    }
    return out;
  };
  SECTION("n=256, H=0.9") {
    const auto a = pooled(256, 0.9, true, 200, 900);
    const auto b = pooled(256, 0.9, false, 200, 77000);
    CHECK(test_support::mean(a) == Approx(test_support::mean(b)).margin(0.02));
    CHECK(test_support::sample_variance(a) ==
          Approx(test_support::sample_variance(b)).margin(0.05));
    CHECK(test_support::ks_two_sample_p(a, b) > 0.01);
  }
  SECTION("n=128, H=0.7") {
    const auto a = pooled(128, 0.7, true, 200, 123);
    const auto b = pooled(128, 0.7, false, 200, 456);
    CHECK(test_support::ks_two_sample_p(a, b) > 0.01);
  }
}

TEST_CASE("generate_fgn determinism and guards") {
  const FgnSample a = generate_fgn(512, 0.8, 99);
  const FgnSample b = generate_fgn(512, 0.8, 99);
  REQUIRE(a.values.size() == b.values.size());
  CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0);
  const FgnSample c = generate_fgn(512, 0.8, 100);
  CHECK(a.values != c.values);
  CHECK(a.n == 512);
  CHECK(a.spacing == 1.0);
  CHECK_THROWS_AS(generate_fgn(1, 0.8, 0), DomainError);
  CHECK_THROWS_AS(generate_fgn(64, 1.2, 0), DomainError);
}

TEST_CASE("cholesky oracle guards and small-n behaviour") {
  CHECK_THROWS_AS(cholesky_fgn_oracle(2049, 0.7, 0), DomainError);
  // n=2 at H=1/2: increments independent across many seeds
  double sum_xy = 0.0, sum_xx = 0.0, sum_yy = 0.0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    const FgnSample f = cholesky_fgn_oracle(2, 0.5, 40000 + s);
    sum_xy += f.values[0] * f.values[1];
    sum_xx += f.values[0] * f.values[0];
    sum_yy += f.values[1] * f.values[1];
  }
  CHECK(std::abs(sum_xy / std::sqrt(sum_xx * sum_yy)) < 0.05);
}

TEST_CASE("cholesky oracle empirical covariance matches the closed form") {
  const std::size_t n = 64;
  const double h = 0.7;
  const int seeds = 10000;
  std::vector<double> acc(4, 0.0);
  double var = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const FgnSample f = cholesky_fgn_oracle(n, h, 60000 + s);
    var += test_support::autocov_zero_mean(f.values, 0);
    for (std::size_t lag = 1; lag <= acc.size(); ++lag)
      acc[lag - 1] += test_support::autocov_zero_mean(f.values, lag);
  }
  CHECK(var / seeds == Approx(1.0).margin(0.03));
  for (std::size_t lag = 1; lag <= acc.size(); ++lag)
    CHECK(acc[lag - 1] / seeds == Approx(fgn_autocovariance(long(lag), h)).margin(0.03));
}

TEST_CASE("fbm_path basics") {
  const SamplePath p = fbm_path(256, 1.0, 0.6, 7);
  CHECK(p.values.size() == 257);
  CHECK(p.values[0] == 0.0);
  CHECK(p.horizon == 1.0);
  CHECK_THROWS_AS(fbm_path(3, 1.0, 0.6, 7), DomainError);
  CHECK_THROWS_AS(fbm_path(16, -1.0, 0.6, 7), DomainError);
}

TEST_CASE("fbm_path endpoint variance is t^{2H}") {
  const int seeds = 2000;
  std::vector<double> endpoints;
  endpoints.reserve(seeds);
  for (int s = 0; s < seeds; ++s) endpoints.push_back(fbm_path(4096, 1.0, 0.6, 80000 + s).values.back());
  CHECK(test_support::sample_variance(endpoints) == Approx(1.0).margin(0.1));
}

TEST_CASE("fbm_path horizon scaling is self-similar") {
  const SamplePath p1 = fbm_path(128, 1.0, 0.7, 31);
  const SamplePath p2 = fbm_path(128, 2.0, 0.7, 31);
  const double factor = std::pow(2.0, 0.7);
  for (std::size_t j = 0; j <= 128; ++j)
    CHECK(p2.values[j] == Approx(factor * p1.values[j]).margin(1e-12));
}
