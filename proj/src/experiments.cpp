#include "kmslab/experiments.hpp"

#include "kmslab/discrete.hpp"
#include "kmslab/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace kmslab {

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::Pass: return "PASS";
  case Verdict::WeakPass: return "WEAK-PASS";
  case Verdict::Fail: return "FAIL";
  case Verdict::NotApplicable: return "NotApplicable";
  case Verdict::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

std::string to_string(TailProduct which) {
  switch (which) {
  case TailProduct::GU: return "g*u";
  case TailProduct::HV: return "h*v";
  case TailProduct::G: return "g";
  case TailProduct::H: return "h";
  }
  return "unknown";
}

Verdict slope_verdict(const LineFit& fit, double target, double slack) {
  if (!(fit.slope <= target + slack)) return Verdict::Fail;
  return fit.rms_residual > kWeakFitResidual ? Verdict::WeakPass : Verdict::Pass;
}

const SlopeVerdict* EstimateReport::slope(const std::string& name) const {
  for (const auto& s : slopes) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_budget(), n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

void check_lambdas(const std::vector<double>& lambdas) {
  if (lambdas.size() < kMinSweepPoints) {
    throw InsufficientSweep("sweep needs at least " + std::to_string(kMinSweepPoints) +
                            " lambda values, got " + std::to_string(lambdas.size()));
  }
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw InvalidArgument("sweep: lambda values must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) {
      throw InvalidArgument("sweep: lambda values must be strictly increasing");
    }
  }
}

SlopeVerdict fit_slope(const std::string& name, const std::vector<double>& lambdas,
                       const std::vector<double>& values, double target, double slack) {
  SlopeVerdict s;
  s.name = name;
  s.target = target;
  s.slack = slack;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0 && std::isfinite(values[i])) {
      x.push_back(std::log(lambdas[i]));
      y.push_back(std::log(values[i]));
    }
  }
  if (x.size() < kMinSweepPoints) {
    s.verdict = Verdict::Inconclusive;
    return s;
  }
  s.fit = fit_line(x, y);
  s.verdict = slope_verdict(s.fit, target, slack);
  return s;
}

Verdict combine(const std::vector<SlopeVerdict>& slopes) {
  bool weak = false;
  for (const auto& s : slopes) {
    if (s.verdict == Verdict::Fail) return Verdict::Fail;
    if (s.verdict == Verdict::Inconclusive) return Verdict::Inconclusive;
    if (s.verdict == Verdict::WeakPass) weak = true;
  }
  return weak ? Verdict::WeakPass : Verdict::Pass;
}

} // namespace

EstimateReport apriori_scaling_sweep(const Field& f0, const std::vector<double>& lambdas,
                                     const NonlinearitySpec& spec, const ProblemParams& params,
                                     const SolveConfig& config, double slack) {
  check_lambdas(lambdas);
  config.validate();
  const double p = params.p(), r = params.r(), theta = params.theta();

  EstimateReport rep;
  rep.sigma = sigma_exponent(params);
  rep.inv_p_minus_1 = 1.0 / (p - 1.0);
  rep.energy_exponent = (rep.sigma + 1.0) / (2.0 * p);
  if (admissibility_check(params).admissible()) rep.zone = zone_classify(params, f0.grid().dim());

  rep.points.resize(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const auto res = picard_system_solve(f0 * lambdas[i], spec, params, config);
    SweepPoint& pt = rep.points[i];
    pt.lambda = lambdas[i];
    pt.converged = res.converged;
    pt.status = to_string(res.status);
    pt.u_coupling_norm = lq_norm(res.u, params.coupling_exponent());
    pt.u_w1p = w1p_seminorm(res.u, p);
    pt.v_w1p = w1p_seminorm(res.v, p);
    pt.mixed = mixed_energy(res.u, res.v, r, theta).value;
    pt.max_u = res.u.max_abs();
    pt.max_v = res.v.max_abs();
    pt.A_k = res.A_k;
    pt.residual1 = res.residual1;
    pt.residual2 = res.residual2;
  });

  std::vector<double> lam, a, b, c, e;
  for (const auto& pt : rep.points) {
    if (!pt.converged) continue;
    lam.push_back(pt.lambda);
    a.push_back(pt.u_coupling_norm);
    const double u2p = std::pow(pt.u_w1p, 2.0 * p);
    const double v2p = std::pow(pt.v_w1p, 2.0 * p);
    b.push_back(u2p);
    c.push_back(pt.mixed);
    e.push_back(u2p + v2p + pt.mixed);
  }
  if (lam.size() < kMinSweepPoints) {
    throw InsufficientSweep("only " + std::to_string(lam.size()) + " of " +
                            std::to_string(lambdas.size()) + " sweep points converged");
  }
  rep.slopes.push_back(fit_slope("u_coupling_norm", lam, a, rep.sigma, slack));
  rep.slopes.push_back(fit_slope("u_w1p_2p", lam, b, rep.sigma + 1.0, slack));
  rep.slopes.push_back(fit_slope("mixed_energy", lam, c, rep.sigma + 1.0, slack));
  rep.slopes.push_back(fit_slope("energy_sum", lam, e, rep.sigma + 1.0, slack));
  rep.overall = combine(rep.slopes);
  return rep;
}

EstimateReport linf_scaling_probe(const Field& F0, const std::vector<double>& lambdas, double t,
                                  double p, double N, const SolveConfig& config, double slack) {
  EstimateReport rep;
  rep.inv_p_minus_1 = 1.0 / (p - 1.0);
  if (!(t > N / p)) {
    rep.applicable = false;
    rep.overall = Verdict::NotApplicable;
    return rep;
  }
  check_lambdas(lambdas);
  config.validate();
  // Only p is read by the decoupled solve; the remaining exponents are placeholders.
  const ProblemParams params(N, p, 2.0, 0.5 * std::min(1.0, p - 1.0), 1.5);
  const auto spec = NonlinearitySpec::zero_coupling(2.0, params.theta());
  const Field zero(F0.grid_ptr());

  rep.points.resize(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const auto inner = inner_scalar_solve(1.0, zero, Equation::First, F0 * lambdas[i], spec, params, config);
    SweepPoint& pt = rep.points[i];
    pt.lambda = lambdas[i];
    pt.converged = inner.converged();
    pt.status = to_string(inner.status);
    pt.max_u = inner.solution.max_abs();
    pt.u_w1p = w1p_seminorm(inner.solution, p);
    pt.residual1 = inner.residual;
  });

  std::vector<double> lam, m;
  for (const auto& pt : rep.points) {
    if (!pt.converged) continue;
    lam.push_back(pt.lambda);
    m.push_back(pt.max_u);
  }
  if (lam.size() < kMinSweepPoints) {
    throw InsufficientSweep("only " + std::to_string(lam.size()) + " probe points converged");
  }
  rep.slopes.push_back(fit_slope("max_abs", lam, m, rep.inv_p_minus_1, slack));
  rep.overall = combine(rep.slopes);
  return rep;
}

MixedEnergy mixed_energy(const Grid& grid, std::span<const double> u, std::span<const double> v,
                         double r, double theta, Quadrature quad) {
  if (u.size() != grid.node_count() || v.size() != grid.node_count()) {
    throw InvalidArgument("mixed_energy: nodal vectors do not match the grid");
  }
  MixedEnergy out;
  std::vector<double> uc(u.begin(), u.end()), vc(v.begin(), v.end());
  for (std::size_t i = 0; i < uc.size(); ++i) {
    if (uc[i] < 0.0) {
      uc[i] = 0.0;
      ++out.clipped;
    }
    if (vc[i] < 0.0) {
      vc[i] = 0.0;
      ++out.clipped;
    }
  }
  std::vector<double> terms;
  if (quad == Quadrature::Nodal) {
    const double m = grid.nodal_weight();
    for (std::size_t node : grid.interior_nodes()) {
      terms.push_back(m * pow_abs(uc[node], r) * pow_abs(vc[node], theta + 1.0));
    }
  } else {
    const std::size_t nc = std::size_t{1} << grid.dim();
    std::vector<std::size_t> corners(nc);
    terms.resize(grid.cell_count());
    for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
      grid.cell_corners(cell, corners);
      double su = 0.0, sv = 0.0;
      for (std::size_t c : corners) {
        su += uc[c];
        sv += vc[c];
      }
      const double inv = 1.0 / static_cast<double>(nc);
      terms[cell] = grid.cell_volume() * pow_abs(su * inv, r) * pow_abs(sv * inv, theta + 1.0);
    }
  }
  out.value = pairwise_sum(terms);
  return out;
}

MixedEnergy mixed_energy(const Field& u, const Field& v, double r, double theta, Quadrature quad) {
  require_same_grid(u, v, "mixed_energy");
  return mixed_energy(u.grid(), u.values(), v.values(), r, theta, quad);
}

TailTable tail_uniform_integrability(const NonlinearitySpec& spec, const Field& u, const Field& v,
                                     const std::vector<double>& n_grid, TailProduct which,
                                     const Field* f) {
  require_same_grid(u, v, "tail_uniform_integrability");
  if (f) require_same_grid(u, *f, "tail_uniform_integrability");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (!(n_grid[i] >= 0.0)) throw InvalidArgument("tail_uniform_integrability: levels must be >= 0");
    if (i > 0 && !(n_grid[i] > n_grid[i - 1])) {
      throw InvalidArgument("tail_uniform_integrability: levels must be increasing");
    }
  }
  const Grid& grid = u.grid();
  const double m = grid.nodal_weight();
  const auto interior = grid.interior_nodes();
  std::vector<double> H(interior.size()), FU(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const std::size_t node = interior[i];
    const Point x = grid.node_position(node);
    double val = 0.0;
    switch (which) {
    case TailProduct::GU: val = spec.g(x, u[node], v[node]) * u[node]; break;
    case TailProduct::HV: val = spec.h(x, u[node], v[node]) * v[node]; break;
    case TailProduct::G: val = spec.g(x, u[node], v[node]); break;
    case TailProduct::H: val = spec.h(x, u[node], v[node]); break;
    }
    H[i] = m * std::abs(val);
    if (f) FU[i] = m * (*f)[node] * u[node];
  }
  TailTable table;
  table.which = which;
  std::vector<double> terms(interior.size()), maj(interior.size());
  for (double n : n_grid) {
    for (std::size_t i = 0; i < interior.size(); ++i) {
      const double un = u[interior[i]];
      terms[i] = std::abs(un) > n ? H[i] : 0.0;
      maj[i] = un > n ? FU[i] : 0.0;
    }
    TailRow row;
    row.n = n;
    row.value = pairwise_sum(terms);
    if (f) row.majorant = pairwise_sum(maj);
    table.rows.push_back(row);
  }
  return table;
}

bool ProofChainReport::all_ok() const {
  return mixed_ok && std::all_of(rows.begin(), rows.end(), [](const ProofChainRow& r) { return r.ok; });
}

ProofChainReport proof_chain_check(const NonlinearitySpec& spec, const Field& u, const Field& v,
                                   const Field& fk, double c1, const std::vector<double>& n_levels,
                                   double rel_tol) {
  require_same_grid(u, fk, "proof_chain_check");
  const auto table = tail_uniform_integrability(spec, u, v, n_levels, TailProduct::GU, &fk);
  const Grid& grid = u.grid();
  const double m = grid.nodal_weight();
  std::vector<double> fu, afu;
  for (std::size_t node : grid.interior_nodes()) {
    fu.push_back(m * fk[node] * u[node]);
    afu.push_back(std::abs(fu.back()));
  }
  ProofChainReport rep;
  rep.tolerance = rel_tol * std::max(1.0, pairwise_sum(afu));
  for (const auto& row : table.rows) {
    ProofChainRow pr;
    pr.n = row.n;
    pr.lhs = row.value;
    pr.rhs = *row.majorant;
    pr.ok = pr.lhs <= pr.rhs + rep.tolerance;
    rep.rows.push_back(pr);
  }
  rep.mixed_lhs = c1 * mixed_energy(u, v, spec.r(), spec.theta(), Quadrature::Nodal).value;
  rep.mixed_rhs = pairwise_sum(fu);
  rep.mixed_ok = rep.mixed_lhs <= rep.mixed_rhs + rep.tolerance;
  return rep;
}

NontrivialityReport nontriviality_check(const DatumSpec& datum, const NonlinearitySpec& spec,
                                        const ProblemParams& params, int d,
                                        const std::vector<int>& levels, const SolveConfig& config) {
  if (levels.empty()) throw InvalidArgument("nontriviality_check: need at least one level");
  NontrivialityReport rep;
  if (datum.kind == DatumSpec::Kind::Singular) {
    const double pstar_conj = holder_conjugate(sobolev_conjugate(params.p(), params.N()));
    rep.datum_in_Lm = params.m() * datum.gamma < d;
    rep.datum_outside_Lpstar_conj = pstar_conj * datum.gamma >= d;
  }
  rep.rows.resize(levels.size());
  parallel_for(levels.size(), [&](std::size_t i) {
    const auto grid = make_grid(d, levels[i]);
    const auto res = picard_system_solve(sample(datum, grid), spec, params, config);
    auto& row = rep.rows[i];
    row.n = levels[i];
    row.l1_u = lq_norm(res.u, 1.0);
    row.l1_v = lq_norm(res.v, 1.0);
    row.converged = res.converged;
    row.status = to_string(res.status);
    row.A_k = res.A_k;
  });
  rep.floor_u = 0.5 * rep.rows.front().l1_u;
  rep.floor_v = 0.5 * rep.rows.front().l1_v;
  auto judge = [&](double floor, auto get) {
    if (!(floor > 0.0)) return Verdict::Fail;
    for (const auto& row : rep.rows) {
      if (!row.converged || !(get(row) > floor)) return Verdict::Fail;
    }
    return Verdict::Pass;
  };
  rep.verdict_u = judge(rep.floor_u, [](const NontrivialityRow& r) { return r.l1_u; });
  rep.verdict_v = judge(rep.floor_v, [](const NontrivialityRow& r) { return r.l1_v; });
  rep.overall = rep.verdict_u == Verdict::Pass && rep.verdict_v == Verdict::Pass ? Verdict::Pass
                                                                                : Verdict::Fail;
  return rep;
}

RegularityReport regularity_probe(const Field& u, const std::vector<double>& q_grid,
                                  std::optional<double> q_max) {
  RegularityReport rep;
  for (double q : q_grid) {
    if (!(q > 1.0) || (q_max && !(q < *q_max))) {
      throw InvalidArgument("regularity_probe: q out of range");
    }
    rep.norms.emplace_back(q, lq_norm(u, q));
  }
  const double top = u.max_abs();
  rep.verdict = "Inconclusive";
  if (!(top > 0.0)) return rep;
  rep.lambda_max = top;
  rep.lambda_min = top / 10.0;

  const Grid& grid = u.grid();
  const double m = grid.nodal_weight();
  constexpr int kLevels = 10;
  std::vector<double> x, y;
  for (int j = kLevels; j >= 1; --j) {
    const double lambda = top * std::pow(10.0, -static_cast<double>(j) / kLevels);
    std::size_t count = 0;
    for (std::size_t node : grid.interior_nodes()) {
      if (std::abs(u[node]) > lambda) ++count;
    }
    const double meas = m * static_cast<double>(count);
    rep.levels.emplace_back(lambda, meas);
    if (count > 0) {
      x.push_back(std::log(lambda));
      y.push_back(std::log(meas));
    }
  }
  std::vector<double> distinct = y;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < kMinSweepPoints) return rep;
  rep.fit = fit_line(x, y);
  rep.tail_exponent = -rep.fit->slope;
  rep.verdict = "Fitted";
  return rep;
}

} // namespace kmslab
