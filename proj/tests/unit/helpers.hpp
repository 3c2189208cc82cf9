#pragma once

#include "kmslab/exponents.hpp"
#include "kmslab/grid.hpp"
#include "kmslab/numeric.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <optional>

namespace kmslab::testing {

inline ::testing::AssertionResult RelNear(double actual, double expected, double tol) {
  const double scale = std::max(std::abs(expected), 1e-300);
  if (std::abs(actual - expected) <= tol * scale) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "actual " << actual << " expected " << expected
                                       << " relative error " << std::abs(actual - expected) / scale;
}

/// Random admissible parameters, or nullopt when the draw misses the window.
inline std::optional<ProblemParams> random_admissible(SplitRng& rng) {
  const double N = 3.0 + std::floor(rng.uniform(0.0, 3.0));
  const double p = rng.uniform(1.2, N - 0.3);
  const double theta_hi = std::min(p - 1.0, p * p / (N - p));
  const double theta = rng.uniform(0.02, 0.98) * theta_hi;
  const double r = rng.uniform(1.05, 8.0);
  const double ps = N * p / (N - p);
  const double lo = std::min((r + theta + 1.0) / (r + theta), ps / (ps - 1.0));
  const double hi = N / p;
  if (!(lo < hi)) return std::nullopt;
  const double m = lo + rng.uniform(0.01, 0.99) * (hi - lo);
  return ProblemParams(N, p, r, theta, m);
}

/// Random field on the grid with Dirichlet zeros, values in [-amp, amp].
inline Field random_field(const GridPtr& grid, SplitRng& rng, double amp = 1.0) {
  return Field::sample(grid, [&](const Point&) { return rng.uniform(-amp, amp); });
}

} // namespace kmslab::testing
