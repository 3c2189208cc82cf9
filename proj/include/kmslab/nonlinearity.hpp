#pragma once

#include "kmslab/grid.hpp"
#include "kmslab/numeric.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace kmslab {

/// Constants a nonlinearity claims for its growth bounds:
///   c1 |s|^r |t|^(theta+1) <= g s,   |g| <= c2 |s|^(r-1) |t|^(theta+1),
///   d1 |s|^r |t|^(theta+1) <= h t,   |h| <= d2 |s|^r |t|^theta.
struct GrowthConstants {
  double c1 = 1.0, c2 = 1.0, d1 = 1.0, d2 = 1.0;
};

using SpatialWeight = std::function<double(const Point&)>;
/// Pointwise evaluator (x, s, t) -> value. Must be stateless or internally
/// synchronized: specs are shared across threads.
using CouplingFn = std::function<double(const Point&, double, double)>;

/// g = s|s|^(r-2)|t|^(theta+1), h = t|s|^r|t|^(theta-1).
struct Prototype {
  double r, theta;
};

/// g = V1(x) s|s|^(r-2)|t|^(theta+1) (cos(pi s) + pi),
/// h = V2(x) t|s|^r|t|^(theta-1) (sin(pi t) + pi), with e_i <= V_i <= V_i_max.
struct WeightedOscillatory {
  double r, theta;
  SpatialWeight V1, V2;
  double e1, e2;
  double V1_max, V2_max;
};

struct Custom {
  std::string name;
  double r, theta;
  CouplingFn g, h;
  /// Optional s-derivative of g; when absent the solver lags the reaction.
  CouplingFn g_ds;
};

/// Immutable description of the coupling pair (g, h).
class NonlinearitySpec {
public:
  using Variant = std::variant<Prototype, WeightedOscillatory, Custom>;

  /// Unit constants, which the prototype attains with equality.
  static NonlinearitySpec prototype(double r, double theta);
  /// Checks e_i > 0 and e_i <= V_i <= V_i_max on a sample lattice of [0,1]^3.
  /// Claimed constants: c1 = e1(pi-1), c2 = V1_max(pi+1), d1 = e2(pi-1), d2 = V2_max(pi+1).
  static NonlinearitySpec weighted_oscillatory(double r, double theta, SpatialWeight V1,
                                               SpatialWeight V2, double e1, double e2,
                                               double V1_max, double V2_max);
  /// Constant weights V1 = w1, V2 = w2.
  static NonlinearitySpec weighted_oscillatory(double r, double theta, double w1 = 1.0,
                                               double w2 = 1.0);
  /// Custom specs declare their constants; they are verified, never inferred.
  static NonlinearitySpec custom(Custom def, GrowthConstants claimed);

  /// g = h = 0 (decoupled control). Claims unit constants it does not satisfy.
  static NonlinearitySpec zero_coupling(double r, double theta);
  /// g = -s|t|^(theta+1), h prototype: violates the sign condition on g by construction.
  static NonlinearitySpec sign_violating(double r, double theta);

  double g(const Point& x, double s, double t) const;
  double h(const Point& x, double s, double t) const;
  /// d g / d s when g is C^1 in s at this point; std::nullopt means "lag it".
  std::optional<double> g_ds(const Point& x, double s, double t) const;
  /// Antiderivative of g in s from 0. Throws NonVariational unless Prototype.
  double primitive_in_s(const Point& x, double s, double t) const;
  bool is_variational() const { return std::holds_alternative<Prototype>(variant_); }

  double r() const;
  double theta() const;
  const GrowthConstants& claimed() const { return claimed_; }
  const Variant& variant() const { return variant_; }
  std::string kind_name() const;

private:
  NonlinearitySpec(Variant v, GrowthConstants c) : variant_(std::move(v)), claimed_(c) {}

  Variant variant_;
  GrowthConstants claimed_;
};

inline double g_eval(const NonlinearitySpec& spec, const Point& x, double s, double t) {
  return spec.g(x, s, t);
}
inline double h_eval(const NonlinearitySpec& spec, const Point& x, double s, double t) {
  return spec.h(x, s, t);
}
inline double primitive_in_s(const NonlinearitySpec& spec, const Point& x, double s, double t) {
  return spec.primitive_in_s(x, s, t);
}

/// Positive truncation level (eta for T_eta, k for the datum, n for G_n).
class TruncationLevel {
public:
  explicit TruncationLevel(double level);
  double value() const { return level_; }

private:
  double level_;
};

/// T_eta(s) = min{eta, max{-eta, s}}.
inline double truncate(TruncationLevel eta, double s) {
  const double e = eta.value();
  return s > e ? e : (s < -e ? -e : s);
}

/// G_n(s) = s - T_n(s).
inline double tail_part(TruncationLevel n, double s) { return s - truncate(n, s); }

/// Source of sample points (x, s, t) for the growth-bound verifier. Signs of
/// s and t are uniform; magnitudes are log-uniform over [10^lo, 10^hi].
class GrowthSampler {
public:
  /// Throws InvalidArgument unless hi - lo >= 4 decades.
  GrowthSampler(SplitRng rng, int dim, double log10_lo = -2.0, double log10_hi = 2.0);

  struct Sample {
    Point x;
    double s, t;
  };
  Sample next();

private:
  double signed_magnitude();

  SplitRng rng_;
  int dim_;
  double lo_, hi_;
};

struct HypothesisCheck {
  std::string name;      ///< "H1" .. "H4"
  std::string bound;     ///< "lower" or "upper"
  double claimed = 0.0;
  double worst_ratio = 0.0;  ///< min ratio for lower bounds, max for upper bounds
  bool passed = true;
  std::size_t evaluated = 0;
  std::optional<GrowthSampler::Sample> witness;  ///< first violating sample
  double witness_ratio = 0.0;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  std::size_t samples = 0;
  bool all_passed() const;
};

/// Relative tolerance of the growth-bound verdicts.
inline constexpr double kGrowthTol = 1e-10;

/// Samples the four growth bounds against the spec's claimed constants.
/// Failures are data: the report records the worst ratio and a witness.
HypothesisReport verify_growth_bounds(const NonlinearitySpec& spec, GrowthSampler& sampler,
                                      std::size_t n_samples);

} // namespace kmslab
