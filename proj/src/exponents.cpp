#include "kmslab/exponents.hpp"

#include "kmslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kmslab {

namespace {

bool near(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kThresholdTol * scale;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

Condition less_than(std::string name, std::string failure, double value, double threshold) {
  Condition c;
  c.name = std::move(name);
  c.failure = std::move(failure);
  c.value = value;
  c.threshold = threshold;
  c.passed = value < threshold;
  c.near_threshold = near(value, threshold);
  return c;
}

} // namespace

ProblemParams::ProblemParams(double N, double p, double r, double theta, double m, double c1,
                             double c2, double d1, double d2)
    : N_(N), p_(p), r_(r), theta_(theta), m_(m), c1_(c1), c2_(c2), d1_(d1), d2_(d2) {
  if (!(N > 2.0)) throw InvalidArgument("ProblemParams: N must exceed 2, got " + fmt(N));
  if (!(p > 1.0 && p < N)) throw InvalidArgument("ProblemParams: need 1 < p < N, got p=" + fmt(p));
  if (!(r > 1.0)) throw InvalidArgument("ProblemParams: need r > 1, got " + fmt(r));
  if (!(theta > 0.0)) throw InvalidArgument("ProblemParams: need theta > 0, got " + fmt(theta));
  if (!(m > 1.0)) throw InvalidArgument("ProblemParams: need m > 1, got " + fmt(m));
  if (!(c1 > 0.0 && c2 > 0.0 && d1 > 0.0 && d2 > 0.0)) {
    throw InvalidArgument("ProblemParams: growth constants must be positive");
  }
  if (c1 > c2) throw InvalidArgument("ProblemParams: c1 > c2 makes the g bounds unsatisfiable");
  if (d1 > d2) throw InvalidArgument("ProblemParams: d1 > d2 makes the h bounds unsatisfiable");
}

ProblemParams ProblemParams::with_m(double m) const {
  return ProblemParams(N_, p_, r_, theta_, m, c1_, c2_, d1_, d2_);
}

ProblemParams ProblemParams::with_p(double p) const {
  return ProblemParams(N_, p, r_, theta_, m_, c1_, c2_, d1_, d2_);
}

double sobolev_conjugate(double p, double N) {
  if (!(p > 1.0) || !(p < N)) {
    throw InvalidArgument("sobolev_conjugate: need 1 < p < N, got p=" + fmt(p) + ", N=" + fmt(N));
  }
  return N * p / (N - p);
}

double holder_conjugate(double q) {
  if (!(q > 1.0)) throw InvalidArgument("holder_conjugate: need q > 1, got " + fmt(q));
  return q / (q - 1.0);
}

RegularizedExponents regularized_exponents(double tau, double p, double N) {
  if (!(p > 1.0) || !(p < N)) throw InvalidArgument("regularized_exponents: need 1 < p < N");
  if (!(tau >= 1.0)) throw InvalidArgument("regularized_exponents: need tau >= 1");
  if (!(tau < N / p)) {
    throw InvalidArgument("regularized_exponents: need tau < N/p = " + fmt(N / p) + ", got " +
                          fmt(tau));
  }
  return {N * tau * (p - 1.0) / (N - tau), N * tau * (p - 1.0) / (N - tau * p)};
}

bool AdmissibilityVerdict::admissible() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const Condition& c) { return c.passed; });
}

std::vector<std::string> AdmissibilityVerdict::failures() const {
  std::vector<std::string> out;
  for (const auto& c : conditions) {
    if (!c.passed) out.push_back(c.failure);
  }
  return out;
}

AdmissibilityVerdict admissibility_check(const ProblemParams& params) {
  const double N = params.N(), p = params.p(), r = params.r(), theta = params.theta();
  const double m = params.m();
  const double m_lower =
      std::min(holder_conjugate(params.coupling_exponent()),
               holder_conjugate(sobolev_conjugate(p, N)));

  AdmissibilityVerdict v;
  v.conditions.push_back(less_than("min{(r+theta+1)', (p*)'} < m", "m <= min{(r+theta+1)', (p*)'}",
                                   m_lower, m));
  v.conditions.push_back(less_than("m < N/p", "m >= N/p", m, N / p));
  v.conditions.push_back(less_than("theta < p-1", "theta >= p-1", theta, p - 1.0));
  v.conditions.push_back(
      less_than("theta < p^2/(N-p)", "theta >= p^2/(N-p)", theta, p * p / (N - p)));
  // r > 1 is already a constructor invariant; it is listed for completeness.
  v.conditions.push_back(less_than("r > 1", "r <= 1", 1.0, r));
  return v;
}

double sigma_exponent(const ProblemParams& params) {
  const double p = params.p();
  const double m_conj = holder_conjugate(params.m());
  if (m_conj >= params.coupling_exponent()) return 2.0 * p / (2.0 * p - 1.0);
  return 1.0 / (params.r() + params.theta());
}

std::string to_string(Zone zone) {
  switch (zone) {
  case Zone::USobolevRegularized: return "U_SobolevRegularized";
  case Zone::ULebesgueRegularized: return "U_LebesgueRegularized";
  case Zone::OutsideRegularizingZone: return "OutsideRegularizingZone";
  }
  return "unknown";
}

ZoneReport zone_classify(const ProblemParams& params, std::optional<int> grid_dim) {
  const auto verdict = admissibility_check(params);
  if (!verdict.admissible()) {
    std::string why;
    for (const auto& f : verdict.failures()) why += (why.empty() ? "" : "; ") + f;
    throw InvalidArgument("zone_classify: inadmissible parameters (" + why + ")");
  }
  const double N = params.N(), p = params.p(), r = params.r(), theta = params.theta();
  const double m = params.m();
  const double s = params.coupling_exponent();

  ZoneReport z;
  z.p_star = sobolev_conjugate(p, N);
  z.m_conj = holder_conjugate(m);
  z.coupling_conj = holder_conjugate(s);
  z.p_star_conj = holder_conjugate(z.p_star);
  const auto reg = regularized_exponents(m, p, N);
  z.m_star_p = reg.star;
  z.m_double_star_p = reg.double_star;
  z.lebesgue_upper = N * s / (N * (p - 1.0) + p * s);
  z.t_v = z.p_star * s / (z.p_star * r + theta * s);
  z.analytic_dim = N;
  z.grid_dim = grid_dim;
  z.dimension_mismatch = grid_dim.has_value() && static_cast<double>(*grid_dim) != N;

  if (near(r + theta, z.p_star - 1.0)) z.near_thresholds.emplace_back("r+theta = p*-1");
  if (near(m, z.coupling_conj)) z.near_thresholds.emplace_back("m = (r+theta+1)'");
  if (near(m, z.p_star_conj)) z.near_thresholds.emplace_back("m = (p*)'");
  if (near(m, z.lebesgue_upper)) {
    z.near_thresholds.emplace_back("m = N(r+theta+1)/(N(p-1)+p(r+theta+1))");
  }

  const bool strong_coupling = r + theta > z.p_star - 1.0;
  z.v_sobolev = strong_coupling;
  if (strong_coupling && z.coupling_conj < m && m < z.p_star_conj) {
    z.zone = Zone::USobolevRegularized;
  } else if (strong_coupling && z.p_star_conj <= m && m < z.lebesgue_upper) {
    z.zone = Zone::ULebesgueRegularized;
  } else {
    z.zone = Zone::OutsideRegularizingZone;
  }
  return z;
}

double eta_threshold_exponent(double p, double r, double theta) {
  if (!(p > 1.0)) throw InvalidArgument("eta_threshold_exponent: need p > 1");
  const double pm1 = p - 1.0;
  const double two_p_m1 = 2.0 * p - 1.0;
  return 2.0 * r / pm1 +
         (theta + 1.0) * (2.0 * r * two_p_m1 + (theta + two_p_m1) * pm1) / (pm1 * pm1 * two_p_m1);
}

} // namespace kmslab
