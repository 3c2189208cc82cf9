#include "kmslab/nonlinearity.hpp"

#include "kmslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>

namespace kmslab {

namespace {

constexpr double kPi = std::numbers::pi;

// Factored magnitudes shared by g, h and the verifier denominators.
double g_mag(double r, double theta, double s, double t) {
  return pow_abs(s, r - 1.0) * pow_abs(t, theta + 1.0);
}
double h_mag(double r, double theta, double s, double t) {
  return pow_abs(s, r) * pow_abs(t, theta);
}

void check_exponents(double r, double theta, const char* where) {
  if (!(r > 1.0)) throw InvalidArgument(std::string(where) + ": need r > 1");
  if (!(theta > 0.0)) throw InvalidArgument(std::string(where) + ": need theta > 0");
}

void check_weight(const SpatialWeight& V, double e, double V_max, const char* name) {
  if (!V) throw InvalidArgument(std::string("weighted_oscillatory: ") + name + " is empty");
  if (!(e > 0.0)) throw InvalidArgument(std::string("weighted_oscillatory: lower bound of ") + name + " must be positive");
  if (!(V_max >= e)) throw InvalidArgument(std::string("weighted_oscillatory: sup bound of ") + name + " below its lower bound");
  constexpr int n = 9;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Point x{i / (n - 1.0), j / (n - 1.0), k / (n - 1.0)};
        const double w = V(x);
        if (!(w >= e) || !(w <= V_max)) {
          throw InvalidArgument(std::string("weighted_oscillatory: ") + name + " = " +
                                std::to_string(w) + " leaves [" + std::to_string(e) + ", " +
                                std::to_string(V_max) + "] at a sample point");
        }
      }
    }
  }
}

} // namespace

NonlinearitySpec NonlinearitySpec::prototype(double r, double theta) {
  check_exponents(r, theta, "prototype");
  return NonlinearitySpec(Prototype{r, theta}, GrowthConstants{});
}

NonlinearitySpec NonlinearitySpec::weighted_oscillatory(double r, double theta, SpatialWeight V1,
                                                        SpatialWeight V2, double e1, double e2,
                                                        double V1_max, double V2_max) {
  check_exponents(r, theta, "weighted_oscillatory");
  check_weight(V1, e1, V1_max, "V1");
  check_weight(V2, e2, V2_max, "V2");
  GrowthConstants c{e1 * (kPi - 1.0), V1_max * (kPi + 1.0), e2 * (kPi - 1.0), V2_max * (kPi + 1.0)};
  return NonlinearitySpec(
      WeightedOscillatory{r, theta, std::move(V1), std::move(V2), e1, e2, V1_max, V2_max}, c);
}

NonlinearitySpec NonlinearitySpec::weighted_oscillatory(double r, double theta, double w1,
                                                        double w2) {
  return weighted_oscillatory(
      r, theta, [w1](const Point&) { return w1; }, [w2](const Point&) { return w2; }, w1, w2, w1,
      w2);
}

NonlinearitySpec NonlinearitySpec::custom(Custom def, GrowthConstants claimed) {
  check_exponents(def.r, def.theta, "custom");
  if (!def.g || !def.h) throw InvalidArgument("custom: g and h evaluators are required");
  if (!(claimed.c1 > 0.0 && claimed.c2 > 0.0 && claimed.d1 > 0.0 && claimed.d2 > 0.0)) {
    throw InvalidArgument("custom: claimed constants must be positive");
  }
  return NonlinearitySpec(std::move(def), claimed);
}

NonlinearitySpec NonlinearitySpec::zero_coupling(double r, double theta) {
  auto zero = [](const Point&, double, double) { return 0.0; };
  return custom(Custom{"zero", r, theta, zero, zero, zero}, GrowthConstants{});
}

NonlinearitySpec NonlinearitySpec::sign_violating(double r, double theta) {
  auto g = [theta](const Point&, double s, double t) { return -s * pow_abs(t, theta + 1.0); };
  auto g_ds = [theta](const Point&, double, double t) { return -pow_abs(t, theta + 1.0); };
  auto h = [r, theta](const Point&, double s, double t) {
    return sign_of(t) * h_mag(r, theta, s, t);
  };
  return custom(Custom{"sign_violating", r, theta, g, h, g_ds}, GrowthConstants{});
}

double NonlinearitySpec::g(const Point& x, double s, double t) const {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Prototype>) {
          return sign_of(s) * g_mag(v.r, v.theta, s, t);
        } else if constexpr (std::is_same_v<T, WeightedOscillatory>) {
          return v.V1(x) * sign_of(s) * g_mag(v.r, v.theta, s, t) * (std::cos(kPi * s) + kPi);
        } else {
          return v.g(x, s, t);
        }
      },
      variant_);
}

double NonlinearitySpec::h(const Point& x, double s, double t) const {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Prototype>) {
          return sign_of(t) * h_mag(v.r, v.theta, s, t);
        } else if constexpr (std::is_same_v<T, WeightedOscillatory>) {
          return v.V2(x) * sign_of(t) * h_mag(v.r, v.theta, s, t) * (std::sin(kPi * t) + kPi);
        } else {
          return v.h(x, s, t);
        }
      },
      variant_);
}

std::optional<double> NonlinearitySpec::g_ds(const Point& x, double s, double t) const {
  return std::visit(
      [&](const auto& v) -> std::optional<double> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Prototype>) {
          if (v.r < 2.0) return std::nullopt;
          return (v.r - 1.0) * pow_abs(s, v.r - 2.0) * pow_abs(t, v.theta + 1.0);
        } else if constexpr (std::is_same_v<T, WeightedOscillatory>) {
          if (v.r < 2.0) return std::nullopt;
          const double tt = pow_abs(t, v.theta + 1.0);
          const double osc = std::cos(kPi * s) + kPi;
          const double d = (v.r - 1.0) * pow_abs(s, v.r - 2.0) * tt * osc -
                           sign_of(s) * pow_abs(s, v.r - 1.0) * tt * kPi * std::sin(kPi * s);
          return v.V1(x) * d;
        } else {
          if (!v.g_ds) return std::nullopt;
          return v.g_ds(x, s, t);
        }
      },
      variant_);
}

double NonlinearitySpec::primitive_in_s(const Point&, double s, double t) const {
  const auto* proto = std::get_if<Prototype>(&variant_);
  if (!proto) {
    throw NonVariational("primitive_in_s: no closed-form primitive for " + kind_name() + " specs");
  }
  return pow_abs(s, proto->r) / proto->r * pow_abs(t, proto->theta + 1.0);
}

double NonlinearitySpec::r() const {
  return std::visit([](const auto& v) { return v.r; }, variant_);
}

double NonlinearitySpec::theta() const {
  return std::visit([](const auto& v) { return v.theta; }, variant_);
}

std::string NonlinearitySpec::kind_name() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Prototype>) return "prototype";
        else if constexpr (std::is_same_v<T, WeightedOscillatory>) return "weighted_oscillatory";
        else return "custom:" + v.name;
      },
      variant_);
}

TruncationLevel::TruncationLevel(double level) : level_(level) {
  if (!(level > 0.0)) throw InvalidArgument("TruncationLevel: level must be positive");
}

GrowthSampler::GrowthSampler(SplitRng rng, int dim, double log10_lo, double log10_hi)
    : rng_(rng), dim_(dim), lo_(log10_lo), hi_(log10_hi) {
  if (dim < 1 || dim > 3) throw InvalidArgument("GrowthSampler: dimension must be 1, 2 or 3");
  if (!(hi_ - lo_ >= 4.0)) throw InvalidArgument("GrowthSampler: need at least 4 decades");
}

double GrowthSampler::signed_magnitude() {
  const double mag = std::pow(10.0, rng_.uniform(lo_, hi_));
  return rng_.uniform() < 0.5 ? -mag : mag;
}

GrowthSampler::Sample GrowthSampler::next() {
  Sample out{{0.0, 0.0, 0.0}, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) out.x[static_cast<std::size_t>(a)] = rng_.uniform();
  out.s = signed_magnitude();
  out.t = signed_magnitude();
  return out;
}

bool HypothesisReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

HypothesisReport verify_growth_bounds(const NonlinearitySpec& spec, GrowthSampler& sampler,
                                      std::size_t n_samples) {
  if (n_samples == 0) throw InvalidArgument("verify_growth_bounds: need at least one sample");
  const double r = spec.r(), theta = spec.theta();
  const auto& c = spec.claimed();

  HypothesisReport report;
  const double inf = std::numeric_limits<double>::infinity();
  auto make = [](const char* name, const char* bound, double claimed, double start) {
    HypothesisCheck c;
    c.name = name;
    c.bound = bound;
    c.claimed = claimed;
    c.worst_ratio = start;
    return c;
  };
  report.checks = {make("H1", "lower", c.c1, inf), make("H2", "upper", c.c2, -inf),
                   make("H3", "lower", c.d1, inf), make("H4", "upper", c.d2, -inf)};

  auto record = [](HypothesisCheck& chk, const GrowthSampler::Sample& smp, double num, double den) {
    if (!(den > 0.0) || !std::isfinite(den)) return;
    const double ratio = num / den;
    ++chk.evaluated;
    bool ok;
    if (chk.bound == "lower") {
      chk.worst_ratio = std::min(chk.worst_ratio, ratio);
      ok = ratio >= chk.claimed * (1.0 - kGrowthTol);
    } else {
      chk.worst_ratio = std::max(chk.worst_ratio, ratio);
      ok = ratio <= chk.claimed * (1.0 + kGrowthTol);
    }
    if (!ok || !std::isfinite(ratio)) {
      if (chk.passed) {
        chk.witness = smp;
        chk.witness_ratio = ratio;
      }
      chk.passed = false;
    }
  };

  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto smp = sampler.next();
    const double g = spec.g(smp.x, smp.s, smp.t);
    const double h = spec.h(smp.x, smp.s, smp.t);
    const double gm = g_mag(r, theta, smp.s, smp.t);
    const double hm = h_mag(r, theta, smp.s, smp.t);
    record(report.checks[0], smp, g * smp.s, gm * std::abs(smp.s));
    record(report.checks[1], smp, std::abs(g), gm);
    record(report.checks[2], smp, h * smp.t, hm * std::abs(smp.t));
    record(report.checks[3], smp, std::abs(h), hm);
  }
  report.samples = n_samples;
  return report;
}

} // namespace kmslab
