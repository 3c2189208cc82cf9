#pragma once

#include "kmslab/datum.hpp"
#include "kmslab/exponents.hpp"
#include "kmslab/grid.hpp"
#include "kmslab/nonlinearity.hpp"
#include "kmslab/numeric.hpp"
#include "kmslab/solver.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kmslab {

enum class Verdict { Pass, WeakPass, Fail, NotApplicable, Inconclusive };

std::string to_string(Verdict v);

/// A PASS whose fit residual exceeds this (log scale) is downgraded to WEAK-PASS.
inline constexpr double kWeakFitResidual = 0.05;
/// Slope fits need at least this many points.
inline constexpr std::size_t kMinSweepPoints = 4;

struct SlopeVerdict {
  std::string name;
  LineFit fit;
  double target = 0.0;
  double slack = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

/// slope <= target + slack is PASS (WEAK-PASS on a poor fit), else FAIL.
Verdict slope_verdict(const LineFit& fit, double target, double slack);

struct SweepPoint {
  double lambda = 0.0;
  bool converged = false;
  std::string status;
  double u_coupling_norm = 0.0;  ///< ||u||_{L^(r+theta+1)}
  double u_w1p = 0.0;
  double v_w1p = 0.0;
  double mixed = 0.0;
  double max_u = 0.0;
  double max_v = 0.0;
  double A_k = 0.0;
  double residual1 = 0.0;
  double residual2 = 0.0;
};

struct EstimateReport {
  std::vector<SweepPoint> points;
  std::vector<SlopeVerdict> slopes;
  double sigma = 0.0;
  double inv_p_minus_1 = 0.0;
  double energy_exponent = 0.0;  ///< (sigma + 1) / (2p)
  std::optional<ZoneReport> zone;
  bool applicable = true;
  Verdict overall = Verdict::Inconclusive;

  const SlopeVerdict* slope(const std::string& name) const;
};

/// Solves with f = lambda f0 for every lambda (concurrently) and fits log-log slopes:
///   u_coupling_norm  against sigma,
///   u_w1p_2p, mixed_energy, energy_sum  against sigma + 1.
/// Non-converged points are dropped; fewer than four remaining throws InsufficientSweep.
EstimateReport apriori_scaling_sweep(const Field& f0, const std::vector<double>& lambdas,
                                     const NonlinearitySpec& spec, const ProblemParams& params,
                                     const SolveConfig& config, double slack = 0.1);

/// Single decoupled equation with coefficient 1 and source lambda F0; fits log max|w|
/// against 1/(p-1). NotApplicable (no solves) when t <= N/p.
EstimateReport linf_scaling_probe(const Field& F0, const std::vector<double>& lambdas, double t,
                                  double p, double N, const SolveConfig& config,
                                  double slack = 0.1);

enum class Quadrature { Midpoint, Nodal };

struct MixedEnergy {
  double value = 0.0;
  std::size_t clipped = 0;  ///< negative nodal values of u or v set to 0
};

/// Integral of u^r v^(theta+1) over nonnegative parts.
MixedEnergy mixed_energy(const Field& u, const Field& v, double r, double theta,
                         Quadrature quad = Quadrature::Midpoint);
MixedEnergy mixed_energy(const Grid& grid, std::span<const double> u, std::span<const double> v,
                         double r, double theta, Quadrature quad = Quadrature::Midpoint);

enum class TailProduct { GU, HV, G, H };

std::string to_string(TailProduct which);

struct TailRow {
  double n = 0.0;
  double value = 0.0;     ///< nodal integral of |H| over {|u| > n}
  std::optional<double> majorant;  ///< nodal integral of f u over {u > n}, when f is given
};

struct TailTable {
  TailProduct which = TailProduct::GU;
  std::vector<TailRow> rows;
};

TailTable tail_uniform_integrability(const NonlinearitySpec& spec, const Field& u, const Field& v,
                                     const std::vector<double>& n_grid, TailProduct which,
                                     const Field* f = nullptr);

struct ProofChainRow {
  double n = 0.0;
  double lhs = 0.0;  ///< integral of g u over {u > n}
  double rhs = 0.0;  ///< integral of f u over {u > n}
  bool ok = false;
};

struct ProofChainReport {
  std::vector<ProofChainRow> rows;
  double mixed_lhs = 0.0;  ///< c1 * mixed energy (nodal)
  double mixed_rhs = 0.0;  ///< integral of f u
  bool mixed_ok = false;
  double tolerance = 0.0;
  bool all_ok() const;
};

/// Checks the two integral inequalities of the a priori chain with nodal quadrature;
/// `fk` is the datum the solve actually used. Tolerance is rel_tol * max(1, integral |f u|).
ProofChainReport proof_chain_check(const NonlinearitySpec& spec, const Field& u, const Field& v,
                                   const Field& fk, double c1, const std::vector<double>& n_levels,
                                   double rel_tol = 1e-8);

struct NontrivialityRow {
  int n = 0;
  double l1_u = 0.0;
  double l1_v = 0.0;
  bool converged = false;
  std::string status;
  double A_k = 0.0;
};

struct NontrivialityReport {
  std::vector<NontrivialityRow> rows;
  double floor_u = 0.0;
  double floor_v = 0.0;
  Verdict verdict_u = Verdict::Fail;
  Verdict verdict_v = Verdict::Fail;
  Verdict overall = Verdict::Fail;
  /// Singular data only: m gamma < d and (p*)' gamma >= d on the computational dimension.
  std::optional<bool> datum_in_Lm;
  std::optional<bool> datum_outside_Lpstar_conj;
};

/// Solves on each refinement level (n nodes per axis, dimension d) and compares the
/// L^1 norms of u and v with half their coarsest-level values.
NontrivialityReport nontriviality_check(const DatumSpec& datum, const NonlinearitySpec& spec,
                                        const ProblemParams& params, int d,
                                        const std::vector<int>& levels, const SolveConfig& config);

struct RegularityReport {
  std::vector<std::pair<double, double>> norms;   ///< (q, ||u||_q)
  std::vector<std::pair<double, double>> levels;  ///< (lambda, meas{|u| > lambda})
  std::optional<LineFit> fit;
  double tail_exponent = 0.0;  ///< minus the fitted slope
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::string verdict;         ///< "Fitted" or "Inconclusive"
};

/// Lebesgue norms over q_grid and a log-log fit of the distribution function over the
/// top decade of levels. When q_max is given, every q must lie in (1, q_max).
RegularityReport regularity_probe(const Field& u, const std::vector<double>& q_grid,
                                  std::optional<double> q_max = std::nullopt);

/// Runs fn(i) for i in [0, n) on up to thread_budget() threads. Exceptions are
/// rethrown in index order after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace kmslab
