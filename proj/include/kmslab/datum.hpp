#pragma once

#include "kmslab/grid.hpp"

#include <string>

namespace kmslab {

/// Analytic data sampled onto a grid.
struct DatumSpec {
  enum class Kind { Zero, Constant, Sine, Singular };

  Kind kind = Kind::Constant;
  double amplitude = 1.0;
  /// Sine: amplitude * prod_a sin(frequency pi x_a). Frequency 2 has a negative lobe.
  double frequency = 1.0;
  /// Singular: amplitude * |x - center|^(-gamma), center snapped to the nearest cell midpoint.
  Point center{0.5, 0.5, 0.5};
  double gamma = 1.0;

  static DatumSpec zero();
  static DatumSpec constant(double value);
  static DatumSpec sine(double frequency, double amplitude = 1.0);
  static DatumSpec singular(double gamma, Point center = {0.5, 0.5, 0.5}, double amplitude = 1.0);

  std::string kind_name() const;
};

DatumSpec::Kind parse_datum_kind(const std::string& name);

/// The singular center actually used on this grid.
Point snapped_center(const Grid& grid, const Point& center);

Field sample(const DatumSpec& datum, const GridPtr& grid);

} // namespace kmslab
