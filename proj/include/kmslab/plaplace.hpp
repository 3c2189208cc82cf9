#pragma once

#include "kmslab/grid.hpp"

#include <Eigen/Core>

namespace kmslab {

/// Gradient-sized vector, at most three components.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

/// |xi|^(p-2) xi, extended by 0 at xi = 0. Throws for p <= 1.
Vec flux(const Vec& xi, double p);

/// (|xi|^2 + eps^2)^((p-2)/2) xi.
Vec regularized_flux(const Vec& xi, double p, double eps);

struct MonotonicityConstants {
  double C;
  double alpha;
  double beta;
  double p;
};

/// C = max{2^(p-2), (2^((2-p)/2)/(p-1))^(p/2)}, alpha = min{p/2, 1},
/// beta = 2/(2-p) for p < 2 and 0 otherwise.
MonotonicityConstants monotonicity_constants(double p);

/// (flux(A) - flux(B)).(A - B) minus |A-B|^p / 2^(p-2) for p >= 2, or minus
/// (p-1)|A-B|^2 / (1+|A|^2+|B|^2)^((2-p)/2) for p < 2.
double pointwise_monotonicity_gap(const Vec& A, const Vec& B, double p);

struct NormMonotonicity {
  double lhs;      ///< ||grad(u1 - u2)||_p^p
  double rhs;      ///< C pairing^alpha (1 + ||grad u1||_p^p + ||grad u2||_p^p)^beta
  double pairing;  ///< integral of (flux(grad u1) - flux(grad u2)).grad(u1 - u2)
};

/// Discrete form of the norm inequality on the gradient samples of the two fields.
NormMonotonicity norm_monotonicity_check(const Field& u1, const Field& u2, double p);

} // namespace kmslab
