#pragma once

#include "kmslab/exponents.hpp"
#include "kmslab/grid.hpp"
#include "kmslab/nonlinearity.hpp"

#include <array>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

namespace kmslab {

enum class Equation { First, Second };

/// Node pair per axis that defines one component of a gradient sample.
struct SampleStencil {
  std::array<std::size_t, 3> lo{};
  std::array<std::size_t, 3> hi{};
};

/// One gradient sample per cell corner for d >= 2, a single one for d = 1.
std::size_t samples_per_cell(const Grid& grid);
/// Quadrature weight of each sample: cell volume / samples_per_cell.
double sample_weight(const Grid& grid);
/// Component a of sample kappa uses the cell edge along axis a through corner kappa.
void cell_sample_stencils(const Grid& grid, std::size_t cell, std::span<SampleStencil> out);

/// Gradient samples stored sample-major: component a of sample j is values[j*dim + a].
struct GradientSamples {
  int dim = 1;
  double weight = 0.0;
  std::vector<double> values;
  std::size_t count() const { return values.size() / static_cast<std::size_t>(dim); }
};

GradientSamples gradient_samples(const Grid& grid, std::span<const double> nodal);
GradientSamples gradient_samples(const Field& u);

/// Edge differences per axis, edges numbered by their lower node.
struct FaceGradients {
  std::array<std::vector<double>, 3> values;
  std::array<std::vector<Point>, 3> midpoints;
};

FaceGradients gradient_at_faces(const Field& u);
FaceGradients gradient_at_faces(const Grid& grid, std::span<const double> nodal);

/// Midpoint rule on cells; the midpoint value is the mean of the cell corners.
double lq_norm(const Field& u, double q);
double lq_norm(const Grid& grid, std::span<const double> nodal, double q);

/// sum over samples of weight * |grad u|^p (no root taken).
double w1p_energy(const Field& u, double p);
double w1p_energy(const Grid& grid, std::span<const double> nodal, double p);
double w1p_seminorm(const Field& u, double p);
double w1p_seminorm(const Grid& grid, std::span<const double> nodal, double p);

/// Midpoint-rule integral of u v.
double integrate_product(const Field& u, const Field& v);

/// 1/k + ||grad u||_p^p + ||grad v||_p^p. Pass k = infinity to drop the 1/k term.
double nonlocal_coefficient(const Field& u, const Field& v, double p, double k);

inline constexpr double kNoRegularization = std::numeric_limits<double>::infinity();

/// Strong-form nodal residual A (-div regularized_flux(grad u)) + reaction - source.
/// Boundary entries are zero.
Field weighted_plap_residual(const Field& u, double A, double p, double eps, const Field& reaction,
                             const Field& source);

/// ||grad phi||_p for the hat function of an interior node.
double hat_norm(const Grid& grid, double p);

/// max over interior hats phi_i of |weak residual(phi_i)| / ||grad phi_i||_p, with the
/// nonlocal coefficient evaluated at (u, v), the datum truncated at level k, and the
/// source 1/k on the second equation.
double weak_residual_dual_norm(const Field& u, const Field& v, const Field& f,
                               const NonlinearitySpec& spec, const ProblemParams& params,
                               Equation which, double k, double eps = 0.0);

/// Header x[,y[,z]],value, one row per node, %.17g.
void write_field_csv(const Field& u, std::ostream& out);

} // namespace kmslab
