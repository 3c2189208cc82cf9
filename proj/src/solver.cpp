#include "kmslab/solver.hpp"

#include "kmslab/assembly.hpp"
#include "kmslab/error.hpp"
#include "kmslab/numeric.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kmslab {

std::string to_string(SolveStatus status) {
  switch (status) {
  case SolveStatus::Converged: return "Converged";
  case SolveStatus::MaxIterations: return "MaxIterations";
  case SolveStatus::OscillationDetected: return "OscillationDetected";
  case SolveStatus::NonfiniteValue: return "NonfiniteValue";
  case SolveStatus::LineSearchStalled: return "LineSearchStalled";
  }
  return "unknown";
}

std::vector<double> default_eps_schedule(double p) {
  if (p == 2.0) return {0.0};
  return {1e-2, 1e-4, 1e-6, 1e-8};
}

void SolveConfig::validate() const {
  if (!(k > 0.0)) throw InvalidArgument("SolveConfig: k must be positive");
  if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) {
    throw InvalidArgument("SolveConfig: tolerances must be positive");
  }
  if (!(relax > 0.0 && relax <= 1.0)) throw InvalidArgument("SolveConfig: relax must lie in (0, 1]");
  if (max_outer < 1 || max_inner < 1) throw InvalidArgument("SolveConfig: iteration caps must be positive");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] >= 0.0)) throw InvalidArgument("SolveConfig: eps values must be >= 0");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1])) {
      throw InvalidArgument("SolveConfig: eps schedule must be strictly decreasing");
    }
  }
}

std::vector<double> SolveConfig::schedule_for(double p) const {
  return eps_schedule.empty() ? default_eps_schedule(p) : eps_schedule;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using VecX = Eigen::VectorXd;

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 30;
constexpr int kMaxStalls = 5;
// Intermediate regularization stages only need a rough solve.
constexpr double kStageTol = 1e-6;

class LinearSolver {
public:
  explicit LinearSolver(int dim) : direct_(dim <= 2) { cg_.setTolerance(1e-13); }

  // The iterative solver references its matrix, so the wrapper owns it.
  bool compute(SpMat J) {
    J_ = std::move(J);
    if (direct_) {
      ldlt_.compute(J_);
      return ldlt_.info() == Eigen::Success;
    }
    cg_.compute(J_);
    return cg_.info() == Eigen::Success;
  }

  VecX solve(const VecX& b) {
    if (direct_) return ldlt_.solve(b);
    return cg_.solve(b);
  }

private:
  bool direct_;
  SpMat J_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg_;
};

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Frozen scalar problem on the interior unknowns of one equation.
class ScalarProblem {
public:
  ScalarProblem(double A, const Field& partner, Equation which, const Field& source,
                const NonlinearitySpec& spec, double p)
      : grid_(partner.grid()), A_(A), partner_(partner), which_(which), source_(source),
        spec_(spec), p_(p), m_(grid_.nodal_weight()), hat_(hat_norm(grid_, p)),
        K_(grid_.node_count()), K_abs_(grid_.node_count()) {
    positions_.reserve(grid_.interior_count());
    for (std::size_t node : grid_.interior_nodes()) positions_.push_back(grid_.node_position(node));
  }

  double hat() const { return hat_; }

  // Dual norm of the load alone; inner tolerances are taken relative to it when it is small.
  double load_dual() const {
    double worst = 0.0;
    for (std::size_t node : grid_.interior_nodes()) worst = std::max(worst, std::abs(source_[node]));
    return m_ * worst / hat_;
  }
  bool variational() const { return which_ == Equation::First && spec_.is_variational(); }

  double reaction(std::size_t i, std::size_t node, double w) const {
    if (which_ == Equation::First) return spec_.g(positions_[i], w, partner_[node]);
    return -spec_.h(positions_[i], partner_[node], w);
  }

  // Interior residual; returns the round-off floor of the dual norm.
  double residual(std::span<const double> w, double eps, VecX& R) {
    diffusion_residual(grid_, w, p_, eps, K_, K_abs_);
    const auto interior = grid_.interior_nodes();
    R.resize(static_cast<Eigen::Index>(interior.size()));
    double scale = 0.0;
    for (std::size_t i = 0; i < interior.size(); ++i) {
      const std::size_t node = interior[i];
      const double react = reaction(i, node, w[node]);
      const double src = source_[node];
      R[static_cast<Eigen::Index>(i)] = A_ * K_[node] + m_ * (react - src);
      scale = std::max(scale, A_ * K_abs_[node] + m_ * (std::abs(react) + std::abs(src)));
    }
    return 64.0 * std::numeric_limits<double>::epsilon() * scale / hat_;
  }

  double energy(std::span<const double> w, double eps) const {
    const auto interior = grid_.interior_nodes();
    std::vector<double> terms(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i) {
      const std::size_t node = interior[i];
      terms[i] = m_ * (spec_.primitive_in_s(positions_[i], w[node], partner_[node]) -
                       source_[node] * w[node]);
    }
    return A_ * diffusion_energy(grid_, w, p_, eps) + pairwise_sum(terms);
  }

  // Nonnegative reaction derivative on the diagonal, or empty when lagged.
  VecX reaction_diagonal(std::span<const double> w) const {
    const auto interior = grid_.interior_nodes();
    VecX diag = VecX::Zero(static_cast<Eigen::Index>(interior.size()));
    if (which_ != Equation::First) return diag;
    for (std::size_t i = 0; i < interior.size(); ++i) {
      const std::size_t node = interior[i];
      const auto gs = spec_.g_ds(positions_[i], w[node], partner_[node]);
      if (gs && std::isfinite(*gs)) diag[static_cast<Eigen::Index>(i)] = m_ * std::max(0.0, *gs);
    }
    return diag;
  }

  SpMat jacobian(std::span<const double> w, double eps, const VecX& diag) const {
    SpMat J = diffusion_jacobian(grid_, w, p_, eps) * A_;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      if (diag[i] != 0.0) J.coeffRef(i, i) += diag[i];
    }
    return J;
  }

  void scatter(const VecX& x, std::vector<double>& w) const {
    const auto interior = grid_.interior_nodes();
    for (std::size_t i = 0; i < interior.size(); ++i) w[interior[i]] = x[static_cast<Eigen::Index>(i)];
  }

  VecX gather(std::span<const double> w) const {
    const auto interior = grid_.interior_nodes();
    VecX x(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t i = 0; i < interior.size(); ++i) x[static_cast<Eigen::Index>(i)] = w[interior[i]];
    return x;
  }

private:
  const Grid& grid_;
  double A_;
  const Field& partner_;
  Equation which_;
  const Field& source_;
  const NonlinearitySpec& spec_;
  double p_;
  double m_;
  double hat_;
  std::vector<Point> positions_;
  std::vector<double> K_, K_abs_;
};

} // namespace

InnerReport inner_scalar_solve(double A, const Field& partner, Equation which, const Field& source,
                               const NonlinearitySpec& spec, const ProblemParams& params,
                               const SolveConfig& config, const std::optional<Field>& initial,
                               const std::optional<std::vector<double>>& schedule) {
  config.validate();
  if (!(A > 0.0)) throw InvalidArgument("inner_scalar_solve: need A > 0");
  require_same_grid(partner, source, "inner_scalar_solve");
  if (initial) require_same_grid(partner, *initial, "inner_scalar_solve");

  const double p = params.p();
  const Grid& grid = partner.grid();
  const auto stages = schedule ? *schedule : config.schedule_for(p);
  if (stages.empty()) throw InvalidArgument("inner_scalar_solve: empty eps schedule");

  ScalarProblem prob(A, partner, which, source, spec, p);
  std::vector<double> w = initial ? std::vector<double>(initial->values().begin(), initial->values().end())
                                  : std::vector<double>(grid.node_count(), 0.0);
  InnerReport rep{Field(partner.grid_ptr())};
  const bool use_energy = prob.variational();
  LinearSolver linear(grid.dim());

  VecX R, R_trial;
  std::vector<double> trial(w.size());
  for (std::size_t si = 0; si < stages.size(); ++si) {
    const double eps = stages[si];
    const bool last = si + 1 == stages.size();
    const double load = prob.load_dual();
    const double rel = load > 0.0 ? std::min(1.0, load) : 1.0;
    const double tol = (last ? config.inner_tol : std::max(config.inner_tol, kStageTol)) * rel;
    rep.eps = eps;

    double floor = prob.residual(w, eps, R);
    double dual = R.cwiseAbs().maxCoeff() / prob.hat();
    std::vector<double> best = w;
    double best_dual = dual;
    double energy = use_energy ? prob.energy(w, eps) : 0.0;
    if (use_energy) rep.energy_history.push_back(energy);

    rep.status = SolveStatus::MaxIterations;
    bool have_factor = false;
    VecX prev_diag;
    int stalls = 0;
    for (int it = 0;; ++it) {
      if (!all_finite(w) || !R.allFinite()) {
        rep.status = SolveStatus::NonfiniteValue;
        break;
      }
      if (dual <= std::max(tol, floor)) {
        rep.status = SolveStatus::Converged;
        break;
      }
      if (it >= config.max_inner) break;
      ++rep.iterations;

      const VecX diag = prob.reaction_diagonal(w);
      const bool constant = p == 2.0 && have_factor && diag == prev_diag;
      if (!constant) {
        if (!linear.compute(prob.jacobian(w, eps, diag))) {
          rep.status = SolveStatus::NonfiniteValue;
          break;
        }
        have_factor = true;
        prev_diag = diag;
      }
      const VecX delta = linear.solve(-R);
      if (!delta.allFinite()) {
        rep.status = SolveStatus::NonfiniteValue;
        break;
      }

      const double rnorm = R.norm();
      const double slope = R.dot(delta);
      double alpha = 1.0;
      bool accepted = false;
      double best_alpha = 0.0, best_rnorm = rnorm, new_energy = energy;
      const VecX x0 = prob.gather(w);
      trial = w;
      for (int k = 0; k <= kMaxHalvings; ++k, alpha *= 0.5) {
        prob.scatter(x0 + alpha * delta, trial);
        prob.residual(trial, eps, R_trial);
        const double tn = R_trial.norm();
        if (std::isfinite(tn) && tn < best_rnorm) {
          best_rnorm = tn;
          best_alpha = alpha;
        }
        if (use_energy && slope < 0.0) {
          const double e = prob.energy(trial, eps);
          if (std::isfinite(e) && e <= energy + kArmijo * alpha * slope) {
            accepted = true;
            new_energy = e;
            break;
          }
        } else if (std::isfinite(tn) && tn <= (1.0 - kArmijo * alpha) * rnorm) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        ++rep.fallbacks;
        if (best_alpha > 0.0) {
          alpha = best_alpha;
          stalls = 0;
        } else {
          alpha = 1.0;
          if (++stalls >= kMaxStalls) {
            rep.status = SolveStatus::LineSearchStalled;
            break;
          }
        }
        prob.scatter(x0 + alpha * delta, trial);
        if (use_energy) new_energy = prob.energy(trial, eps);
      }
      w.swap(trial);
      floor = prob.residual(w, eps, R);
      dual = R.cwiseAbs().maxCoeff() / prob.hat();
      if (use_energy) {
        energy = new_energy;
        rep.energy_history.push_back(energy);
      }
      if (dual < best_dual) {
        best_dual = dual;
        best = w;
      }
    }
    if (rep.status != SolveStatus::Converged) {
      if (rep.status != SolveStatus::NonfiniteValue) {
        w = best;
        dual = best_dual;
      }
      rep.residual = dual;
      // Only the target stage decides the outcome; a rough intermediate stage is kept.
      if (last || rep.status == SolveStatus::NonfiniteValue) break;
      continue;
    }
    rep.residual = dual;
  }
  rep.solution = Field(partner.grid_ptr(), std::move(w));
  return rep;
}

namespace {

bool oscillating(const std::vector<double>& deltas) {
  constexpr std::size_t window = 8;
  if (deltas.size() < window) return false;
  const std::size_t s = deltas.size() - window;
  for (std::size_t i = s + 1; i < deltas.size(); ++i) {
    if (!(deltas[i] * deltas[i - 1] < 0.0)) return false;
  }
  return std::abs(deltas.back()) >= 0.9 * std::abs(deltas[s]);
}

Field truncated(const Field& f, double k) {
  const TruncationLevel level(k);
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x = truncate(level, x);
  return Field(f.grid_ptr(), std::move(v));
}

InnerReport inner_with_retry(double A, const Field& partner, Equation which, const Field& source,
                             const NonlinearitySpec& spec, const ProblemParams& params,
                             const SolveConfig& config, const Field& start, bool full_schedule) {
  const auto sched = config.schedule_for(params.p());
  if (full_schedule || sched.size() == 1) {
    return inner_scalar_solve(A, partner, which, source, spec, params, config, start, sched);
  }
  auto rep = inner_scalar_solve(A, partner, which, source, spec, params, config, start,
                                std::vector<double>{sched.back()});
  if (rep.converged() || rep.status == SolveStatus::NonfiniteValue) return rep;
  auto retry = inner_scalar_solve(A, partner, which, source, spec, params, config, start, sched);
  retry.iterations += rep.iterations;
  return retry.residual <= rep.residual ? retry : rep;
}

} // namespace

SolveResult picard_system_solve(const Field& f, const NonlinearitySpec& spec,
                                const ProblemParams& params, const SolveConfig& config,
                                const SolveResult* warm) {
  config.validate();
  const double p = params.p();
  const double k = config.k;
  const auto grid = f.grid_ptr();
  const Field fk = truncated(f, k);
  const Field inv_k = Field::constant(grid, 1.0 / k);

  SolveResult res{Field(grid), Field(grid)};
  res.k = k;
  res.eps_final = config.schedule_for(p).back();
  if (warm) {
    require_same_grid(f, warm->u, "picard_system_solve");
    res.u = warm->u;
    res.v = warm->v;
  }
  double A = nonlocal_coefficient(res.u, res.v, p, k);
  std::vector<double> deltas;

  for (int j = 1; j <= config.max_outer; ++j) {
    const bool full = j == 1 && !warm;
    auto r1 = inner_with_retry(A, res.v, Equation::First, fk, spec, params, config, res.u, full);
    res.inner_iterations += r1.iterations;
    if (r1.status == SolveStatus::NonfiniteValue) {
      res.status = SolveStatus::NonfiniteValue;
      res.iterations = j;
      break;
    }
    res.u = r1.solution;
    auto r2 = inner_with_retry(A, res.u, Equation::Second, inv_k, spec, params, config, res.v, full);
    res.inner_iterations += r2.iterations;
    if (r2.status == SolveStatus::NonfiniteValue) {
      res.status = SolveStatus::NonfiniteValue;
      res.iterations = j;
      break;
    }
    res.v = r2.solution;

    OuterRecord rec;
    rec.iteration = j;
    rec.A_true = nonlocal_coefficient(res.u, res.v, p, k);
    rec.residual1 = weak_residual_dual_norm(res.u, res.v, f, spec, params, Equation::First, k, res.eps_final);
    rec.residual2 = weak_residual_dual_norm(res.u, res.v, f, spec, params, Equation::Second, k, res.eps_final);
    rec.min_u = res.u.min_value();
    rec.min_v = res.v.min_value();
    rec.inner1 = r1.iterations;
    rec.inner2 = r2.iterations;
    const double A_next = (1.0 - config.relax) * A + config.relax * rec.A_true;
    rec.A = A_next;
    rec.relative_change = std::abs(A_next - A) / A;
    res.history.push_back(rec);
    deltas.push_back(A_next - A);
    A = A_next;
    res.iterations = j;

    if (!std::isfinite(A)) {
      res.status = SolveStatus::NonfiniteValue;
      break;
    }
    if (rec.relative_change <= config.outer_tol && rec.residual1 <= config.outer_tol &&
        rec.residual2 <= config.outer_tol) {
      res.status = SolveStatus::Converged;
      break;
    }
    if (oscillating(deltas)) {
      res.status = SolveStatus::OscillationDetected;
      break;
    }
    if (j == config.max_outer) res.status = SolveStatus::MaxIterations;
  }

  res.converged = res.status == SolveStatus::Converged;
  res.A_k = nonlocal_coefficient(res.u, res.v, p, k);
  if (!res.history.empty()) {
    res.residual1 = res.history.back().residual1;
    res.residual2 = res.history.back().residual2;
  }
  res.min_u = res.u.min_value();
  res.min_v = res.v.min_value();
  res.u_nonnegative = res.min_u >= -config.tol_pos;
  res.v_nonnegative = res.min_v >= -config.tol_pos;
  res.possibly_degenerate = res.A_k < 10.0 / k;
  return res;
}

bool ContinuationResult::all_converged() const {
  return std::all_of(stages.begin(), stages.end(), [](const SolveResult& s) { return s.converged; });
}

ContinuationResult k_continuation(const Field& f, const NonlinearitySpec& spec,
                                  const ProblemParams& params, const std::vector<double>& k_schedule,
                                  const SolveConfig& config) {
  if (k_schedule.empty()) throw InvalidArgument("k_continuation: empty k schedule");
  for (std::size_t i = 0; i < k_schedule.size(); ++i) {
    if (!(k_schedule[i] > 0.0)) throw InvalidArgument("k_continuation: k values must be positive");
    if (i > 0 && !(k_schedule[i] > k_schedule[i - 1])) {
      throw InvalidArgument("k_continuation: k schedule must be strictly increasing");
    }
  }
  ContinuationResult out;
  const double p = params.p();
  for (double k : k_schedule) {
    SolveConfig c = config;
    c.k = k;
    const SolveResult* warm = out.stages.empty() ? nullptr : &out.stages.back();
    out.stages.push_back(picard_system_solve(f, spec, params, c, warm));
    if (out.stages.size() >= 2) {
      const auto& a = out.stages[out.stages.size() - 2];
      const auto& b = out.stages.back();
      CauchyRecord rec;
      rec.k_from = a.k;
      rec.k_to = b.k;
      rec.du = w1p_seminorm(a.u - b.u, p);
      rec.dv = w1p_seminorm(a.v - b.v, p);
      rec.A_from = a.A_k;
      rec.A_to = b.A_k;
      out.cauchy.push_back(rec);
    }
    if (out.stages.back().status == SolveStatus::NonfiniteValue) break;
  }
  return out;
}

LinfVerdict linf_report(const SolveResult& result, const Field& f, const ProblemParams& params,
                        double t, double k) {
  LinfVerdict v;
  v.max_u = result.u.max_abs();
  v.max_v = result.v.max_abs();
  v.applicable = t > params.N() / params.p();
  if (!v.applicable) {
    v.verdict = "NotApplicable";
    return v;
  }
  v.datum_norm = lq_norm(truncated(f, k), t);
  v.shape = std::pow(v.datum_norm, 1.0 / (params.p() - 1.0));
  if (v.shape > 0.0) {
    v.ratio_u = v.max_u / v.shape;
    v.ratio_v = v.max_v / v.shape;
  }
  v.verdict = "Tracked";
  return v;
}

} // namespace kmslab
