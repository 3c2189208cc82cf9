#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kmslab {

/// Tolerance for deciding that a parameter sits on a threshold.
inline constexpr double kThresholdTol = 1e-12;

/// Analytic parameters of the coupled system: dimension N, growth exponent p,
/// coupling exponents r and theta, datum integrability m, and the growth
/// constants of the coupling nonlinearities.
class ProblemParams {
public:
  /// Throws InvalidArgument unless N > 2, 1 < p < N, r > 1, theta > 0,
  /// m > 1, all constants positive, c1 <= c2 and d1 <= d2.
  ProblemParams(double N, double p, double r, double theta, double m, double c1 = 1.0,
                double c2 = 1.0, double d1 = 1.0, double d2 = 1.0);

  double N() const { return N_; }
  double p() const { return p_; }
  double r() const { return r_; }
  double theta() const { return theta_; }
  double m() const { return m_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double d1() const { return d1_; }
  double d2() const { return d2_; }

  /// r + theta + 1, the integrability exponent the coupling buys for u.
  double coupling_exponent() const { return r_ + theta_ + 1.0; }

  ProblemParams with_m(double m) const;
  ProblemParams with_p(double p) const;

  bool operator==(const ProblemParams&) const = default;

private:
  double N_, p_, r_, theta_, m_, c1_, c2_, d1_, d2_;
};

/// N p / (N - p). Throws unless 1 < p < N.
double sobolev_conjugate(double p, double N);

/// q / (q - 1). Throws unless q > 1.
double holder_conjugate(double q);

struct RegularizedExponents {
  double star;         ///< tau*_p  = N tau (p-1) / (N - tau)
  double double_star;  ///< tau**_p = N tau (p-1) / (N - tau p)
};

/// Throws unless 1 <= tau < N/p and 1 < p < N.
RegularizedExponents regularized_exponents(double tau, double p, double N);

/// One inequality of the existence hypotheses, with the number it compares.
struct Condition {
  std::string name;        ///< e.g. "m < N/p"
  std::string failure;     ///< human-readable reason when it fails, e.g. "theta >= p-1"
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  bool near_threshold = false;  ///< |value - threshold| <= kThresholdTol * scale
};

struct AdmissibilityVerdict {
  std::vector<Condition> conditions;
  bool admissible() const;
  std::vector<std::string> failures() const;
};

/// Checks min{(r+theta+1)', (p*)'} < m < N/p, theta < p-1, theta < p^2/(N-p)
/// and r > 1. Never throws; failures are reported per condition.
AdmissibilityVerdict admissibility_check(const ProblemParams& params);

/// 2p/(2p-1) when m' >= r+theta+1, else 1/(r+theta). Pure case formula.
double sigma_exponent(const ProblemParams& params);

enum class Zone { USobolevRegularized, ULebesgueRegularized, OutsideRegularizingZone };

std::string to_string(Zone zone);

struct ZoneReport {
  double p_star = 0.0;
  double m_conj = 0.0;
  double coupling_conj = 0.0;   ///< (r+theta+1)'
  double p_star_conj = 0.0;     ///< (p*)'
  double m_star_p = 0.0;
  double m_double_star_p = 0.0;
  double lebesgue_upper = 0.0;  ///< N(r+theta+1) / (N(p-1) + p(r+theta+1))
  Zone zone = Zone::OutsideRegularizingZone;
  bool v_sobolev = false;
  double t_v = 0.0;             ///< p*(r+theta+1) / (p* r + theta (r+theta+1))
  /// Names of thresholds the parameters sit on (within kThresholdTol).
  std::vector<std::string> near_thresholds;
  double analytic_dim = 0.0;
  std::optional<int> grid_dim;
  /// True when a computational grid dimension was given and differs from N.
  bool dimension_mismatch = false;
};

/// Regularizing-zone classification. Throws InvalidArgument on inadmissible
/// parameters. `grid_dim`, when given, is recorded and compared with N.
ZoneReport zone_classify(const ProblemParams& params, std::optional<int> grid_dim = std::nullopt);

/// Exponent q of the truncation threshold eta > C (k^q + 1) used to make the
/// bounded-truncation problem coincide with the approximate system.
double eta_threshold_exponent(double p, double r, double theta);

} // namespace kmslab
