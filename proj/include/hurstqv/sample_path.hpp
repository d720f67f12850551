#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hurstqv/errors.hpp"

namespace hurstqv {

/// A process observed on the uniform grid t_j = j*T/m, j = 0..m. The grid is
/// stored as (horizon, steps); per-point times are always recomputed exactly.
struct SamplePath {
  double horizon = 1.0;         ///< T > 0
  std::vector<double> values;   ///< m+1 observations, values[j] = X(t_j)

  SamplePath() = default;
  SamplePath(double horizon_, std::vector<double> values_)
      : horizon(horizon_), values(std::move(values_)) {
    if (horizon <= 0.0) throw DomainError("SamplePath: horizon must be positive");
    if (values.size() < 2) throw DomainError("SamplePath: need at least two grid points");
  }

  std::size_t steps() const { return values.size() - 1; }
  double time_at(std::size_t j) const {
    return horizon * static_cast<double>(j) / static_cast<double>(steps());
  }
};

/// Stationary Gaussian increments at unit spacing and unit variance.
struct FgnSample {
  double hurst = 0.5;
  std::size_t n = 0;            ///< number of increments
  double spacing = 1.0;
  std::vector<double> values;   ///< n increments
};

}  // namespace hurstqv
