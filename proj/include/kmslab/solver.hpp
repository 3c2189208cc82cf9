#pragma once

#include "kmslab/discrete.hpp"
#include "kmslab/exponents.hpp"
#include "kmslab/grid.hpp"
#include "kmslab/nonlinearity.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kmslab {

enum class SolveStatus { Converged, MaxIterations, OscillationDetected, NonfiniteValue, LineSearchStalled };

std::string to_string(SolveStatus status);

struct SolveConfig {
  double k = 10.0;
  /// Strictly decreasing flux regularizations; empty selects default_eps_schedule(p).
  std::vector<double> eps_schedule;
  double outer_tol = 1e-8;
  double inner_tol = 1e-10;
  int max_outer = 200;
  int max_inner = 200;
  double relax = 0.5;
  /// Positivity diagnostics report min u >= -tol_pos, min v >= -tol_pos.
  double tol_pos = 1e-10;

  /// Throws InvalidArgument on a violated invariant.
  void validate() const;
  std::vector<double> schedule_for(double p) const;
};

/// {0} for p = 2, otherwise {1e-2, 1e-4, 1e-6, 1e-8}.
std::vector<double> default_eps_schedule(double p);

struct InnerReport {
  Field solution;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  double residual = 0.0;  ///< hat-dual residual norm at the returned iterate
  double eps = 0.0;       ///< regularization of the last stage
  /// Discrete energy at the start and after every accepted step (variational first equation only).
  std::vector<double> energy_history{};
  int fallbacks = 0;      ///< steps taken without a sufficient-decrease certificate
  bool converged() const { return status == SolveStatus::Converged; }
};

/// Solves one equation with the coefficient A and the partner field frozen.
///   First:  A K(u) + M g(x, u, partner) = M source
///   Second: A K(v) = M (h(x, partner, v) + source)
/// K is the regularized p-Laplacian, M the lumped mass. h is always lagged.
InnerReport inner_scalar_solve(double A, const Field& partner, Equation which, const Field& source,
                               const NonlinearitySpec& spec, const ProblemParams& params,
                               const SolveConfig& config,
                               const std::optional<Field>& initial = std::nullopt,
                               const std::optional<std::vector<double>>& schedule = std::nullopt);

struct OuterRecord {
  int iteration = 0;
  double A = 0.0;          ///< coefficient after the damped update
  double A_true = 0.0;     ///< nonlocal_coefficient of the new iterate
  double residual1 = 0.0;
  double residual2 = 0.0;
  double min_u = 0.0;
  double min_v = 0.0;
  double relative_change = 0.0;
  int inner1 = 0;
  int inner2 = 0;
};

struct SolveResult {
  Field u;
  Field v;
  double A_k = 0.0;
  std::vector<OuterRecord> history{};
  bool converged = false;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  int inner_iterations = 0;
  double residual1 = 0.0;
  double residual2 = 0.0;
  double min_u = 0.0;
  double min_v = 0.0;
  bool u_nonnegative = true;
  bool v_nonnegative = true;
  /// A_k < 10/k at the end of the solve.
  bool possibly_degenerate = false;
  double eps_final = 0.0;
  double k = 0.0;
};

/// Gauss-Seidel alternation on the approximate system with datum T_k(f).
/// Starts from u = v = 0 (A = 1/k) unless `warm` is given.
SolveResult picard_system_solve(const Field& f, const NonlinearitySpec& spec,
                                const ProblemParams& params, const SolveConfig& config,
                                const SolveResult* warm = nullptr);

struct CauchyRecord {
  double k_from = 0.0;
  double k_to = 0.0;
  double du = 0.0;  ///< ||grad(u_from - u_to)||_p
  double dv = 0.0;
  double A_from = 0.0;
  double A_to = 0.0;
};

struct ContinuationResult {
  std::vector<SolveResult> stages;
  std::vector<CauchyRecord> cauchy;
  bool all_converged() const;
};

/// Solves along a strictly increasing k schedule, each stage warm-started from the last.
ContinuationResult k_continuation(const Field& f, const NonlinearitySpec& spec,
                                  const ProblemParams& params, const std::vector<double>& k_schedule,
                                  const SolveConfig& config);

struct LinfVerdict {
  bool applicable = false;
  double max_u = 0.0;
  double max_v = 0.0;
  double datum_norm = 0.0;  ///< ||T_k f||_{L^t}
  double shape = 0.0;       ///< datum_norm^(1/(p-1))
  double ratio_u = 0.0;     ///< max_u / shape, 0 when shape = 0
  double ratio_v = 0.0;
  std::string verdict;      ///< "NotApplicable" or "Tracked"
};

/// Bound shape of the L-infinity estimate with unknown constant; applies only for t > N/p.
LinfVerdict linf_report(const SolveResult& result, const Field& f, const ProblemParams& params,
                        double t, double k);

} // namespace kmslab
