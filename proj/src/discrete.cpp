#include "kmslab/discrete.hpp"

#include "kmslab/assembly.hpp"
#include "kmslab/error.hpp"
#include "kmslab/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace kmslab {

namespace {

void check_size(const Grid& grid, std::span<const double> nodal, const char* where) {
  if (nodal.size() != grid.node_count()) {
    throw InvalidArgument(std::string(where) + ": nodal vector does not match the grid");
  }
}

} // namespace

std::size_t samples_per_cell(const Grid& grid) {
  return grid.dim() == 1 ? 1 : (std::size_t{1} << grid.dim());
}

double sample_weight(const Grid& grid) {
  return grid.cell_volume() / static_cast<double>(samples_per_cell(grid));
}

void cell_sample_stencils(const Grid& grid, std::size_t cell, std::span<SampleStencil> out) {
  const int d = grid.dim();
  std::array<std::size_t, 8> corners{};
  grid.cell_corners(cell, std::span<std::size_t>(corners.data(), std::size_t{1} << d));
  const std::size_t per_cell = samples_per_cell(grid);
  for (std::size_t kappa = 0; kappa < per_cell; ++kappa) {
    SampleStencil st;
    for (int a = 0; a < d; ++a) {
      const std::size_t bit = std::size_t{1} << a;
      const auto i = static_cast<std::size_t>(a);
      st.lo[i] = corners[kappa & ~bit];
      st.hi[i] = corners[kappa | bit];
    }
    out[kappa] = st;
  }
}

GradientSamples gradient_samples(const Grid& grid, std::span<const double> nodal) {
  check_size(grid, nodal, "gradient_samples");
  const int d = grid.dim();
  const std::size_t per_cell = samples_per_cell(grid);
  GradientSamples out;
  out.dim = d;
  out.weight = sample_weight(grid);
  out.values.reserve(grid.cell_count() * per_cell * static_cast<std::size_t>(d));
  std::vector<SampleStencil> st(per_cell);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    cell_sample_stencils(grid, cell, st);
    for (const auto& s : st) {
      for (int a = 0; a < d; ++a) {
        const auto i = static_cast<std::size_t>(a);
        out.values.push_back((nodal[s.hi[i]] - nodal[s.lo[i]]) / grid.h(a));
      }
    }
  }
  return out;
}

GradientSamples gradient_samples(const Field& u) { return gradient_samples(u.grid(), u.values()); }

FaceGradients gradient_at_faces(const Grid& grid, std::span<const double> nodal) {
  check_size(grid, nodal, "gradient_at_faces");
  FaceGradients out;
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto idx = grid.node_multi_index(node);
    for (int a = 0; a < grid.dim(); ++a) {
      const auto i = static_cast<std::size_t>(a);
      if (idx[i] + 1 >= grid.n(a)) continue;
      auto next = idx;
      ++next[i];
      const std::size_t other = grid.node_id(next);
      out.values[i].push_back((nodal[other] - nodal[node]) / grid.h(a));
      Point mid = grid.node_position(node);
      mid[i] += 0.5 * grid.h(a);
      out.midpoints[i].push_back(mid);
    }
  }
  return out;
}

FaceGradients gradient_at_faces(const Field& u) { return gradient_at_faces(u.grid(), u.values()); }

double lq_norm(const Grid& grid, std::span<const double> nodal, double q) {
  if (!(q >= 1.0)) throw InvalidArgument("lq_norm: need q >= 1");
  check_size(grid, nodal, "lq_norm");
  const std::size_t nc = std::size_t{1} << grid.dim();
  std::vector<std::size_t> corners(nc);
  std::vector<double> terms(grid.cell_count());
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    grid.cell_corners(cell, corners);
    double sum = 0.0;
    for (std::size_t c : corners) sum += nodal[c];
    terms[cell] = pow_abs(sum / static_cast<double>(nc), q) * grid.cell_volume();
  }
  return std::pow(pairwise_sum(terms), 1.0 / q);
}

double lq_norm(const Field& u, double q) { return lq_norm(u.grid(), u.values(), q); }

double w1p_energy(const Grid& grid, std::span<const double> nodal, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("w1p_energy: need p >= 1");
  const auto gs = gradient_samples(grid, nodal);
  const auto d = static_cast<std::size_t>(gs.dim);
  std::vector<double> terms(gs.count());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    double sq = 0.0;
    for (std::size_t a = 0; a < d; ++a) sq += gs.values[j * d + a] * gs.values[j * d + a];
    terms[j] = gs.weight * (p == 2.0 ? sq : pow_abs(std::sqrt(sq), p));
  }
  return pairwise_sum(terms);
}

double w1p_energy(const Field& u, double p) { return w1p_energy(u.grid(), u.values(), p); }

double w1p_seminorm(const Grid& grid, std::span<const double> nodal, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("w1p_seminorm: need p >= 1");
  return std::pow(w1p_energy(grid, nodal, p), 1.0 / p);
}

double w1p_seminorm(const Field& u, double p) { return w1p_seminorm(u.grid(), u.values(), p); }

double integrate_product(const Field& u, const Field& v) {
  require_same_grid(u, v, "integrate_product");
  const Grid& grid = u.grid();
  const std::size_t nc = std::size_t{1} << grid.dim();
  std::vector<std::size_t> corners(nc);
  std::vector<double> terms(grid.cell_count());
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    grid.cell_corners(cell, corners);
    double su = 0.0, sv = 0.0;
    for (std::size_t c : corners) {
      su += u[c];
      sv += v[c];
    }
    const double inv = 1.0 / static_cast<double>(nc);
    terms[cell] = (su * inv) * (sv * inv) * grid.cell_volume();
  }
  return pairwise_sum(terms);
}

double nonlocal_coefficient(const Field& u, const Field& v, double p, double k) {
  require_same_grid(u, v, "nonlocal_coefficient");
  if (!(k > 0.0)) throw InvalidArgument("nonlocal_coefficient: need k > 0");
  return 1.0 / k + w1p_energy(u, p) + w1p_energy(v, p);
}

Field weighted_plap_residual(const Field& u, double A, double p, double eps, const Field& reaction,
                             const Field& source) {
  if (!(A > 0.0)) throw InvalidArgument("weighted_plap_residual: need A > 0");
  require_same_grid(u, reaction, "weighted_plap_residual");
  require_same_grid(u, source, "weighted_plap_residual");
  const Grid& grid = u.grid();
  std::vector<double> K(grid.node_count());
  diffusion_residual(grid, u.values(), p, eps, K);
  const double m = grid.nodal_weight();
  for (std::size_t node : grid.interior_nodes()) {
    K[node] = A * K[node] / m + reaction[node] - source[node];
  }
  return Field(u.grid_ptr(), std::move(K));
}

double hat_norm(const Grid& grid, double p) {
  std::vector<double> hat(grid.node_count(), 0.0);
  hat[grid.interior_nodes().front()] = 1.0;
  return w1p_seminorm(grid, hat, p);
}

double weak_residual_dual_norm(const Field& u, const Field& v, const Field& f,
                               const NonlinearitySpec& spec, const ProblemParams& params,
                               Equation which, double k, double eps) {
  require_same_grid(u, v, "weak_residual_dual_norm");
  require_same_grid(u, f, "weak_residual_dual_norm");
  const Grid& grid = u.grid();
  const double p = params.p();
  const double A = nonlocal_coefficient(u, v, p, k);
  const TruncationLevel level(k);
  const Field& w = which == Equation::First ? u : v;
  std::vector<double> K(grid.node_count());
  diffusion_residual(grid, w.values(), p, eps, K);
  const double m = grid.nodal_weight();
  double worst = 0.0;
  for (std::size_t node : grid.interior_nodes()) {
    const Point x = grid.node_position(node);
    double R;
    if (which == Equation::First) {
      R = A * K[node] + m * (spec.g(x, u[node], v[node]) - truncate(level, f[node]));
    } else {
      R = A * K[node] - m * (spec.h(x, u[node], v[node]) + 1.0 / k);
    }
    worst = std::max(worst, std::abs(R));
  }
  return worst / hat_norm(grid, p);
}

void write_field_csv(const Field& u, std::ostream& out) {
  const Grid& grid = u.grid();
  static const char* names[3] = {"x", "y", "z"};
  for (int a = 0; a < grid.dim(); ++a) out << names[a] << ',';
  out << "value\n";
  char buf[64];
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const Point x = grid.node_position(node);
    for (int a = 0; a < grid.dim(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g,", x[static_cast<std::size_t>(a)]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", u[node]);
    out << buf;
  }
}

} // namespace kmslab
