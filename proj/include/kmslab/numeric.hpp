#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace kmslab {

/// |s|^a with 0^a = 0 for a > 0 and 0^0 = 1. The base is always made
/// nonnegative first, so negative s never reaches std::pow.
inline double pow_abs(double s, double a) {
  const double m = std::abs(s);
  if (m == 0.0) {
    if (a > 0.0) return 0.0;
    if (a == 0.0) return 1.0;
    return std::numeric_limits<double>::infinity();
  }
  return std::pow(m, a);
}

inline double sign_of(double s) { return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0); }

/// Summation over a fixed binary tree. The tree depends only on the length,
/// so the result is reproducible and monotone in each (nonnegative) summand.
double pairwise_sum(std::span<const double> values);

/// Least-squares line y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::size_t points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Deterministic generator. `split(stream)` derives an independent child, so
/// every consumer of randomness can be handed its own stream from one seed.
class SplitRng {
public:
  explicit SplitRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; one value per call.
  double normal();
  SplitRng split(std::uint64_t stream) const;

private:
  std::uint64_t state_;
};

/// Worker count for parallel sections: KMSLAB_THREADS if set and positive,
/// otherwise the hardware concurrency (at least 1).
unsigned thread_budget();

} // namespace kmslab
