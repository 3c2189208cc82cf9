#include "kmslab/datum.hpp"

#include "kmslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kmslab {

DatumSpec DatumSpec::zero() {
  DatumSpec d;
  d.kind = Kind::Zero;
  d.amplitude = 0.0;
  return d;
}

DatumSpec DatumSpec::constant(double value) {
  DatumSpec d;
  d.kind = Kind::Constant;
  d.amplitude = value;
  return d;
}

DatumSpec DatumSpec::sine(double frequency, double amplitude) {
  DatumSpec d;
  d.kind = Kind::Sine;
  d.frequency = frequency;
  d.amplitude = amplitude;
  return d;
}

DatumSpec DatumSpec::singular(double gamma, Point center, double amplitude) {
  if (!(gamma > 0.0)) throw InvalidArgument("DatumSpec::singular: need gamma > 0");
  DatumSpec d;
  d.kind = Kind::Singular;
  d.gamma = gamma;
  d.center = center;
  d.amplitude = amplitude;
  return d;
}

std::string DatumSpec::kind_name() const {
  switch (kind) {
  case Kind::Zero: return "zero";
  case Kind::Constant: return "constant";
  case Kind::Sine: return "sine";
  case Kind::Singular: return "singular";
  }
  return "unknown";
}

DatumSpec::Kind parse_datum_kind(const std::string& name) {
  if (name == "zero") return DatumSpec::Kind::Zero;
  if (name == "constant") return DatumSpec::Kind::Constant;
  if (name == "sine") return DatumSpec::Kind::Sine;
  if (name == "singular") return DatumSpec::Kind::Singular;
  throw ConfigError("unknown datum kind '" + name + "'");
}

Point snapped_center(const Grid& grid, const Point& center) {
  Point c{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim(); ++a) {
    const auto i = static_cast<std::size_t>(a);
    const double h = grid.h(a);
    const double cells = static_cast<double>(grid.n(a) - 1);
    double j = std::floor((center[i] - grid.lower()[i]) / h);
    j = std::clamp(j, 0.0, cells - 1.0);
    c[i] = grid.lower()[i] + (j + 0.5) * h;
  }
  return c;
}

Field sample(const DatumSpec& datum, const GridPtr& grid) {
  const int d = grid->dim();
  switch (datum.kind) {
  case DatumSpec::Kind::Zero: return Field(grid);
  case DatumSpec::Kind::Constant: return Field::constant(grid, datum.amplitude);
  case DatumSpec::Kind::Sine:
    return Field::sample(grid, [&](const Point& x) {
      double v = datum.amplitude;
      for (int a = 0; a < d; ++a) {
        v *= std::sin(datum.frequency * std::numbers::pi * x[static_cast<std::size_t>(a)]);
      }
      return v;
    });
  case DatumSpec::Kind::Singular: {
    const Point c = snapped_center(*grid, datum.center);
    return Field::sample(grid, [&](const Point& x) {
      double sq = 0.0;
      for (int a = 0; a < d; ++a) {
        const double dx = x[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(a)];
        sq += dx * dx;
      }
      return datum.amplitude * std::pow(sq, -0.5 * datum.gamma);
    });
  }
  }
  return Field(grid);
}

} // namespace kmslab
