#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace kmslab {

/// A point in up to three dimensions; unused trailing coordinates are zero.
using Point = std::array<double, 3>;

/// Uniform structured node grid on an axis-aligned box, d in {1, 2, 3}.
/// Nodes are numbered with axis 0 fastest. Every node on the box boundary is
/// a homogeneous Dirichlet node.
class Grid {
public:
  /// Unit box [0,1]^d with n nodes per axis.
  Grid(int d, int n);
  /// Box [lower, upper] per axis with n_per_axis[a] nodes on axis a.
  Grid(int d, std::array<int, 3> n_per_axis, Point lower, Point upper);

  int dim() const { return d_; }
  int n(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  double h(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }

  std::size_t node_count() const { return node_count_; }
  std::size_t cell_count() const { return cell_count_; }
  std::size_t interior_count() const { return interior_.size(); }

  double cell_volume() const { return cell_volume_; }
  /// Measure of the box.
  double volume() const;
  /// Weight of the nodal (lumped) quadrature rule at an interior node.
  double nodal_weight() const { return cell_volume_; }

  bool is_boundary(std::size_t node) const { return boundary_[node] != 0; }
  /// Interior node ids in increasing order.
  std::span<const std::size_t> interior_nodes() const { return interior_; }
  /// Position of an interior node within interior_nodes(), or -1 for boundary nodes.
  long interior_index(std::size_t node) const { return interior_index_[node]; }

  std::array<int, 3> node_multi_index(std::size_t node) const;
  std::size_t node_id(std::array<int, 3> idx) const;
  Point node_position(std::size_t node) const;

  /// Cells are numbered like nodes on the (n-1)^d cell lattice.
  std::array<int, 3> cell_multi_index(std::size_t cell) const;
  /// Node ids of the 2^d cell corners; corner bit a set means +1 along axis a.
  void cell_corners(std::size_t cell, std::span<std::size_t> out) const;
  Point cell_midpoint(std::size_t cell) const;

  bool operator==(const Grid& other) const;

private:
  void build();

  int d_;
  std::array<int, 3> n_;
  Point lower_, upper_;
  std::array<double, 3> h_{};
  std::size_t node_count_ = 0;
  std::size_t cell_count_ = 0;
  double cell_volume_ = 0.0;
  std::vector<unsigned char> boundary_;
  std::vector<std::size_t> interior_;
  std::vector<long> interior_index_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int d, int n);

/// Nodal scalar field with exactly zero values on boundary nodes.
class Field {
public:
  /// Zero field.
  explicit Field(GridPtr grid);
  /// Throws InvalidArgument when the size is wrong or a boundary value is nonzero.
  Field(GridPtr grid, std::vector<double> values);

  /// Samples `fn` at interior nodes; boundary nodes are set to zero.
  template <class Fn>
  static Field sample(GridPtr grid, Fn&& fn) {
    std::vector<double> v(grid->node_count(), 0.0);
    for (std::size_t node : grid->interior_nodes()) v[node] = fn(grid->node_position(node));
    return Field(std::move(grid), std::move(v), Unchecked{});
  }

  /// Field with constant value c on the interior.
  static Field constant(GridPtr grid, double c);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  std::size_t size() const { return values_.size(); }

  /// Sets an interior value; boundary nodes are rejected.
  void set(std::size_t node, double value);

  double max_abs() const;
  double min_value() const;
  double max_value() const;

  Field operator-(const Field& other) const;
  Field operator+(const Field& other) const;
  Field operator*(double s) const;

  bool same_grid(const Field& other) const;

private:
  struct Unchecked {};
  Field(GridPtr grid, std::vector<double> values, Unchecked)
      : grid_(std::move(grid)), values_(std::move(values)) {}

  GridPtr grid_;
  std::vector<double> values_;
};

/// Throws GridMismatch unless the two fields live on equal grids.
void require_same_grid(const Field& a, const Field& b, const char* where);

} // namespace kmslab
