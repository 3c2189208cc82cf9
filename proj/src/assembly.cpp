#include "kmslab/assembly.hpp"

#include "kmslab/discrete.hpp"
#include "kmslab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace kmslab {

namespace {

// Floor for |xi|^2 + eps^2 in the Hessian; only reached at eps = 0.
constexpr double kTinySq = 1e-300;

struct SampleLoop {
  const Grid& grid;
  std::size_t per_cell;
  double w;
  std::vector<std::size_t> corners;
  std::vector<SampleStencil> stencils;

  explicit SampleLoop(const Grid& g)
      : grid(g), per_cell(samples_per_cell(g)), w(sample_weight(g)),
        corners(std::size_t{1} << g.dim()), stencils(per_cell) {}

  template <class Fn>
  void run(Fn&& fn) {
    const int d = grid.dim();
    for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
      cell_sample_stencils(grid, cell, stencils);
      for (const auto& st : stencils) fn(st, d);
    }
  }
};

double gradient_component(const Grid& grid, std::span<const double> u, const SampleStencil& st,
                          int a) {
  const auto i = static_cast<std::size_t>(a);
  return (u[st.hi[i]] - u[st.lo[i]]) / grid.h(a);
}

} // namespace

double regularized_potential(double xi_sq, double p, double eps) {
  const double s = xi_sq + eps * eps;
  if (p == 2.0) return 0.5 * xi_sq;
  return (std::pow(s, 0.5 * p) - std::pow(eps, p)) / p;
}

void diffusion_residual(const Grid& grid, std::span<const double> u, double p, double eps,
                        std::span<double> K, std::span<double> K_abs) {
  std::fill(K.begin(), K.end(), 0.0);
  const bool want_abs = !K_abs.empty();
  if (want_abs) std::fill(K_abs.begin(), K_abs.end(), 0.0);
  SampleLoop loop(grid);
  const double w = loop.w;
  loop.run([&](const SampleStencil& st, int d) {
    double xi[3] = {0.0, 0.0, 0.0};
    double sq = 0.0;
    for (int a = 0; a < d; ++a) {
      xi[a] = gradient_component(grid, u, st, a);
      sq += xi[a] * xi[a];
    }
    const double scale = p == 2.0 ? 1.0 : std::pow(sq + eps * eps, 0.5 * (p - 2.0));
    for (int a = 0; a < d; ++a) {
      const auto i = static_cast<std::size_t>(a);
      const double c = w * scale * xi[a] / grid.h(a);
      K[st.hi[i]] += c;
      K[st.lo[i]] -= c;
      if (want_abs) {
        const double e = w * scale * (std::abs(u[st.hi[i]]) + std::abs(u[st.lo[i]])) /
                         (grid.h(a) * grid.h(a));
        K_abs[st.hi[i]] += e;
        K_abs[st.lo[i]] += e;
      }
    }
  });
  for (std::size_t node = 0; node < K.size(); ++node) {
    if (grid.is_boundary(node)) {
      K[node] = 0.0;
      if (want_abs) K_abs[node] = 0.0;
    }
  }
}

double diffusion_energy(const Grid& grid, std::span<const double> u, double p, double eps) {
  SampleLoop loop(grid);
  std::vector<double> terms;
  terms.reserve(grid.cell_count() * loop.per_cell);
  loop.run([&](const SampleStencil& st, int d) {
    double sq = 0.0;
    for (int a = 0; a < d; ++a) {
      const double g = gradient_component(grid, u, st, a);
      sq += g * g;
    }
    terms.push_back(loop.w * regularized_potential(sq, p, eps));
  });
  return pairwise_sum(terms);
}

Eigen::SparseMatrix<double> diffusion_jacobian(const Grid& grid, std::span<const double> u,
                                               double p, double eps) {
  const auto n = static_cast<Eigen::Index>(grid.interior_count());
  std::vector<Eigen::Triplet<double>> trip;
  SampleLoop loop(grid);
  trip.reserve(grid.cell_count() * loop.per_cell * static_cast<std::size_t>(4 * grid.dim() * grid.dim()));
  const double w = loop.w;
  loop.run([&](const SampleStencil& st, int d) {
    double xi[3] = {0.0, 0.0, 0.0};
    double sq = 0.0;
    for (int a = 0; a < d; ++a) {
      xi[a] = gradient_component(grid, u, st, a);
      sq += xi[a] * xi[a];
    }
    double H[3][3] = {};
    if (p == 2.0) {
      for (int a = 0; a < d; ++a) H[a][a] = 1.0;
    } else {
      const double s = std::max(sq + eps * eps, kTinySq);
      const double base = std::pow(s, 0.5 * (p - 2.0));
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          H[a][b] = base * ((a == b ? 1.0 : 0.0) + (p - 2.0) * xi[a] * xi[b] / s);
        }
      }
    }
    // d xi_a / d u_n = +1/h_a at hi, -1/h_a at lo.
    for (int a = 0; a < d; ++a) {
      const auto ia = static_cast<std::size_t>(a);
      const std::size_t rows[2] = {st.lo[ia], st.hi[ia]};
      const double rsgn[2] = {-1.0 / grid.h(a), 1.0 / grid.h(a)};
      for (int b = 0; b < d; ++b) {
        if (H[a][b] == 0.0) continue;
        const auto ib = static_cast<std::size_t>(b);
        const std::size_t cols[2] = {st.lo[ib], st.hi[ib]};
        const double csgn[2] = {-1.0 / grid.h(b), 1.0 / grid.h(b)};
        for (int x = 0; x < 2; ++x) {
          const long ri = grid.interior_index(rows[x]);
          if (ri < 0) continue;
          for (int y = 0; y < 2; ++y) {
            const long ci = grid.interior_index(cols[y]);
            if (ci < 0) continue;
            trip.emplace_back(ri, ci, w * rsgn[x] * H[a][b] * csgn[y]);
          }
        }
      }
    }
  });
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

} // namespace kmslab
