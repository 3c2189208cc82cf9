#pragma once

#include "kmslab/grid.hpp"

#include <Eigen/SparseCore>

#include <span>

namespace kmslab {

/// Convex density of the regularized flux: ((|xi|^2 + eps^2)^(p/2) - eps^p) / p.
double regularized_potential(double xi_sq, double p, double eps);

/// K(u)_i = sum over samples of w * regularized_flux(grad u) . d(grad u)/d u_i.
/// `K` has one entry per node; boundary entries are set to zero. When `K_abs`
/// is non-empty it receives the magnitude of the nodal differences entering
/// each entry, a scale for round-off estimates.
void diffusion_residual(const Grid& grid, std::span<const double> u, double p, double eps,
                        std::span<double> K, std::span<double> K_abs = {});

/// sum over samples of w * regularized_potential(|grad u|^2).
double diffusion_energy(const Grid& grid, std::span<const double> u, double p, double eps);

/// dK/du restricted to interior unknowns (ordered as grid.interior_nodes()).
Eigen::SparseMatrix<double> diffusion_jacobian(const Grid& grid, std::span<const double> u,
                                               double p, double eps);

} // namespace kmslab
