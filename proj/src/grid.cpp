#include "kmslab/grid.hpp"

#include "kmslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kmslab {

Grid::Grid(int d, int n) : Grid(d, {n, n, n}, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}) {}

Grid::Grid(int d, std::array<int, 3> n_per_axis, Point lower, Point upper)
    : d_(d), n_(n_per_axis), lower_(lower), upper_(upper) {
  if (d < 1 || d > 3) throw InvalidArgument("Grid: dimension must be 1, 2 or 3");
  for (int a = 0; a < 3; ++a) {
    const auto i = static_cast<std::size_t>(a);
    if (a < d) {
      if (n_[i] < 3) throw InvalidArgument("Grid: need at least 3 nodes per axis");
      if (!(upper_[i] > lower_[i])) throw InvalidArgument("Grid: empty extent on an axis");
    } else {
      n_[i] = 1;
      lower_[i] = 0.0;
      upper_[i] = 0.0;
    }
  }
  build();
}

void Grid::build() {
  node_count_ = 1;
  cell_count_ = 1;
  cell_volume_ = 1.0;
  for (int a = 0; a < d_; ++a) {
    const auto i = static_cast<std::size_t>(a);
    h_[i] = (upper_[i] - lower_[i]) / static_cast<double>(n_[i] - 1);
    node_count_ *= static_cast<std::size_t>(n_[i]);
    cell_count_ *= static_cast<std::size_t>(n_[i] - 1);
    cell_volume_ *= h_[i];
  }
  boundary_.assign(node_count_, 0);
  interior_index_.assign(node_count_, -1);
  interior_.clear();
  for (std::size_t node = 0; node < node_count_; ++node) {
    const auto idx = node_multi_index(node);
    bool on_boundary = false;
    for (int a = 0; a < d_; ++a) {
      const int k = idx[static_cast<std::size_t>(a)];
      if (k == 0 || k == n_[static_cast<std::size_t>(a)] - 1) on_boundary = true;
    }
    boundary_[node] = on_boundary ? 1 : 0;
    if (!on_boundary) {
      interior_index_[node] = static_cast<long>(interior_.size());
      interior_.push_back(node);
    }
  }
}

double Grid::volume() const {
  double v = 1.0;
  for (int a = 0; a < d_; ++a) v *= upper_[static_cast<std::size_t>(a)] - lower_[static_cast<std::size_t>(a)];
  return v;
}

std::array<int, 3> Grid::node_multi_index(std::size_t node) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < d_; ++a) {
    const auto na = static_cast<std::size_t>(n_[static_cast<std::size_t>(a)]);
    idx[static_cast<std::size_t>(a)] = static_cast<int>(node % na);
    node /= na;
  }
  return idx;
}

std::size_t Grid::node_id(std::array<int, 3> idx) const {
  std::size_t id = 0;
  for (int a = d_ - 1; a >= 0; --a) {
    const auto i = static_cast<std::size_t>(a);
    id = id * static_cast<std::size_t>(n_[i]) + static_cast<std::size_t>(idx[i]);
  }
  return id;
}

Point Grid::node_position(std::size_t node) const {
  const auto idx = node_multi_index(node);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < d_; ++a) {
    const auto i = static_cast<std::size_t>(a);
    x[i] = lower_[i] + h_[i] * idx[i];
  }
  return x;
}

std::array<int, 3> Grid::cell_multi_index(std::size_t cell) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < d_; ++a) {
    const auto nc = static_cast<std::size_t>(n_[static_cast<std::size_t>(a)] - 1);
    idx[static_cast<std::size_t>(a)] = static_cast<int>(cell % nc);
    cell /= nc;
  }
  return idx;
}

void Grid::cell_corners(std::size_t cell, std::span<std::size_t> out) const {
  const auto base = cell_multi_index(cell);
  const std::size_t corners = std::size_t{1} << d_;
  for (std::size_t k = 0; k < corners; ++k) {
    auto idx = base;
    for (int a = 0; a < d_; ++a) {
      if (k & (std::size_t{1} << a)) ++idx[static_cast<std::size_t>(a)];
    }
    out[k] = node_id(idx);
  }
}

Point Grid::cell_midpoint(std::size_t cell) const {
  const auto idx = cell_multi_index(cell);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < d_; ++a) {
    const auto i = static_cast<std::size_t>(a);
    x[i] = lower_[i] + h_[i] * (idx[i] + 0.5);
  }
  return x;
}

bool Grid::operator==(const Grid& other) const {
  return d_ == other.d_ && n_ == other.n_ && lower_ == other.lower_ && upper_ == other.upper_;
}

GridPtr make_grid(int d, int n) { return std::make_shared<const Grid>(d, n); }

Field::Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->node_count(), 0.0) {}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->node_count()) {
    throw InvalidArgument("Field: expected " + std::to_string(grid_->node_count()) +
                          " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t node = 0; node < values_.size(); ++node) {
    if (grid_->is_boundary(node) && values_[node] != 0.0) {
      throw InvalidArgument("Field: nonzero value on Dirichlet node " + std::to_string(node));
    }
  }
}

Field Field::constant(GridPtr grid, double c) {
  return sample(std::move(grid), [c](const Point&) { return c; });
}

void Field::set(std::size_t node, double value) {
  if (grid_->is_boundary(node)) throw InvalidArgument("Field::set: boundary node is fixed at 0");
  values_[node] = value;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

double Field::min_value() const {
  double m = values_.empty() ? 0.0 : values_.front();
  for (double x : values_) m = std::min(m, x);
  return m;
}

double Field::max_value() const {
  double m = values_.empty() ? 0.0 : values_.front();
  for (double x : values_) m = std::max(m, x);
  return m;
}

Field Field::operator-(const Field& other) const {
  require_same_grid(*this, other, "Field::operator-");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - other.values_[i];
  return Field(grid_, std::move(v), Unchecked{});
}

Field Field::operator+(const Field& other) const {
  require_same_grid(*this, other, "Field::operator+");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + other.values_[i];
  return Field(grid_, std::move(v), Unchecked{});
}

Field Field::operator*(double s) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * values_[i];
  return Field(grid_, std::move(v), Unchecked{});
}

bool Field::same_grid(const Field& other) const {
  return grid_ == other.grid_ || *grid_ == *other.grid_;
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!a.same_grid(b)) throw GridMismatch(std::string(where) + ": fields live on different grids");
}

} // namespace kmslab
