#include "kmslab/plaplace.hpp"

#include "kmslab/discrete.hpp"
#include "kmslab/error.hpp"
#include "kmslab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace kmslab {

Vec flux(const Vec& xi, double p) {
  if (!(p > 1.0)) throw InvalidArgument("flux: need p > 1");
  const double n = xi.norm();
  if (n == 0.0) return Vec::Zero(xi.size());
  if (p == 2.0) return xi;
  return std::pow(n, p - 2.0) * xi;
}

Vec regularized_flux(const Vec& xi, double p, double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("regularized_flux: need eps >= 0");
  if (eps == 0.0) return flux(xi, p);
  if (p == 2.0) return xi;
  return std::pow(xi.squaredNorm() + eps * eps, 0.5 * (p - 2.0)) * xi;
}

MonotonicityConstants monotonicity_constants(double p) {
  if (!(p > 1.0)) throw InvalidArgument("monotonicity_constants: need p > 1");
  MonotonicityConstants c;
  c.p = p;
  c.alpha = std::min(0.5 * p, 1.0);
  c.beta = p < 2.0 ? 2.0 / (2.0 - p) : 0.0;
  c.C = std::max(std::pow(2.0, p - 2.0), std::pow(std::pow(2.0, 0.5 * (2.0 - p)) / (p - 1.0), 0.5 * p));
  return c;
}

double pointwise_monotonicity_gap(const Vec& A, const Vec& B, double p) {
  const Vec diff = A - B;
  const double lhs = (flux(A, p) - flux(B, p)).dot(diff);
  const double dn = diff.norm();
  double rhs;
  if (p >= 2.0) {
    rhs = pow_abs(dn, p) / std::pow(2.0, p - 2.0);
  } else {
    rhs = (p - 1.0) * dn * dn / std::pow(1.0 + A.squaredNorm() + B.squaredNorm(), 0.5 * (2.0 - p));
  }
  return lhs - rhs;
}

NormMonotonicity norm_monotonicity_check(const Field& u1, const Field& u2, double p) {
  require_same_grid(u1, u2, "norm_monotonicity_check");
  const auto c = monotonicity_constants(p);
  const auto g1 = gradient_samples(u1);
  const auto g2 = gradient_samples(u2);
  const auto d = static_cast<Eigen::Index>(g1.dim);
  const std::size_t n = g1.count();
  std::vector<double> diff_terms(n), pair_terms(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec a = Eigen::Map<const Vec>(g1.values.data() + j * static_cast<std::size_t>(d), d);
    const Vec b = Eigen::Map<const Vec>(g2.values.data() + j * static_cast<std::size_t>(d), d);
    const Vec delta = a - b;
    diff_terms[j] = g1.weight * pow_abs(delta.norm(), p);
    pair_terms[j] = g1.weight * (flux(a, p) - flux(b, p)).dot(delta);
  }
  NormMonotonicity out;
  out.lhs = pairwise_sum(diff_terms);
  out.pairing = pairwise_sum(pair_terms);
  const double growth = 1.0 + w1p_energy(u1, p) + w1p_energy(u2, p);
  out.rhs = c.C * std::pow(std::max(out.pairing, 0.0), c.alpha) * std::pow(growth, c.beta);
  return out;
}

} // namespace kmslab
