#include "kmslab/cli/commands.hpp"

#include "kmslab/cli/artifacts.hpp"
#include "kmslab/error.hpp"
#include "kmslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace kmslab::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Context {
  const RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;
  std::string command;
  std::string outdir;
  std::string label;
};

template <class T>
const T& require(const std::optional<T>& section, const char* name, const std::string& command) {
  if (!section) throw ConfigError("command '" + command + "' needs a [" + std::string(name) + "] section");
  return *section;
}

std::string fmt(double x) { return format_double(x); }
std::string fmt(bool b) { return b ? "true" : "false"; }

void table_row(std::ostream& out, const std::string& name, const std::string& value) {
  out << "  " << std::left << std::setw(34) << name << value << "\n";
}

Json fit_json(const LineFit& f) {
  return {{"slope", number_json(f.slope)}, {"intercept", number_json(f.intercept)},
          {"rms_residual", number_json(f.rms_residual)}, {"points", f.points}};
}

Json zone_json(const ZoneReport& z) {
  Json j = {{"zone", to_string(z.zone)},
            {"p_star", z.p_star},
            {"m_conj", z.m_conj},
            {"coupling_conj", z.coupling_conj},
            {"p_star_conj", z.p_star_conj},
            {"m_star_p", z.m_star_p},
            {"m_double_star_p", z.m_double_star_p},
            {"lebesgue_upper", z.lebesgue_upper},
            {"v_sobolev", z.v_sobolev},
            {"t_v", z.t_v},
            {"near_thresholds", z.near_thresholds},
            {"dimension_mismatch", z.dimension_mismatch}};
  return j;
}

/// Admissibility gate shared by the solve-type commands. Prints reasons.
bool admissible_or_report(const Context& ctx, const ProblemParams& params) {
  const auto verdict = admissibility_check(params);
  if (verdict.admissible()) return true;
  ctx.err << "inadmissible parameters:\n";
  for (const auto& f : verdict.failures()) ctx.err << "  " << f << "\n";
  return false;
}

Field truncated_datum(const Field& f, double k) {
  const TruncationLevel level(k);
  std::vector<double> vals(f.values().begin(), f.values().end());
  for (auto& x : vals) x = truncate(level, x);
  return Field(f.grid_ptr(), std::move(vals));
}

Json solve_json(const SolveResult& r) {
  return {{"converged", r.converged},
          {"status", to_string(r.status)},
          {"k", r.k},
          {"A_k", r.A_k},
          {"iterations", r.iterations},
          {"inner_iterations", r.inner_iterations},
          {"residual1", r.residual1},
          {"residual2", r.residual2},
          {"min_u", r.min_u},
          {"min_v", r.min_v},
          {"max_u", r.u.max_value()},
          {"max_v", r.v.max_value()},
          {"u_nonnegative", r.u_nonnegative},
          {"v_nonnegative", r.v_nonnegative},
          {"possibly_degenerate", r.possibly_degenerate},
          {"eps_final", r.eps_final}};
}

CsvTable history_csv(const SolveResult& r) {
  CsvTable t({"iteration", "A", "A_true", "residual1", "residual2", "min_u", "min_v",
              "relative_change", "inner1", "inner2"});
  for (const auto& h : r.history) {
    t.row({std::to_string(h.iteration), fmt(h.A), fmt(h.A_true), fmt(h.residual1),
           fmt(h.residual2), fmt(h.min_u), fmt(h.min_v), fmt(h.relative_change),
           std::to_string(h.inner1), std::to_string(h.inner2)});
  }
  return t;
}

void print_solve_summary(std::ostream& out, const SolveResult& r) {
  table_row(out, "status", to_string(r.status));
  table_row(out, "outer iterations", std::to_string(r.iterations));
  table_row(out, "A_k", fmt(r.A_k));
  table_row(out, "residual (first)", fmt(r.residual1));
  table_row(out, "residual (second)", fmt(r.residual2));
  table_row(out, "min u / min v", fmt(r.min_u) + " / " + fmt(r.min_v));
  if (r.possibly_degenerate) table_row(out, "warning", "PossiblyDegenerate");
}

// zones ---------------------------------------------------------------------

int cmd_zones(const Context& ctx, ArtifactWriter& w, Json& report) {
  const auto& params = require(ctx.cfg.problem, "problem", ctx.command);
  const auto verdict = admissibility_check(params);
  const bool ok = verdict.admissible();
  const double N = params.N(), p = params.p();

  CsvTable csv({"quantity", "value"});
  auto put = [&](const std::string& name, const std::string& value) {
    table_row(ctx.out, name, value);
    csv.row({name, value});
  };

  ctx.out << "exponents\n";
  put("p*", fmt(sobolev_conjugate(p, N)));
  put("(p*)'", fmt(holder_conjugate(sobolev_conjugate(p, N))));
  put("m'", fmt(holder_conjugate(params.m())));
  put("(r+theta+1)'", fmt(holder_conjugate(params.coupling_exponent())));
  if (params.m() < N / p) {
    const auto reg = regularized_exponents(params.m(), p, N);
    put("m*_p", fmt(reg.star));
    put("m**_p", fmt(reg.double_star));
  } else {
    put("m*_p", "undefined (m >= N/p)");
    put("m**_p", "undefined (m >= N/p)");
  }
  put("sigma", fmt(sigma_exponent(params)));
  put("q (eta threshold)", fmt(eta_threshold_exponent(p, params.r(), params.theta())));

  ctx.out << "admissibility\n";
  Json conds = Json::array();
  for (const auto& c : verdict.conditions) {
    std::string line = c.passed ? "ok" : "FAIL: " + c.failure;
    if (c.near_threshold) line += " (near threshold)";
    put(c.name, line);
    conds.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value},
                     {"threshold", c.threshold}, {"near_threshold", c.near_threshold},
                     {"failure", c.passed ? "" : c.failure}});
  }
  put("verdict", ok ? "admissible" : "inadmissible");
  report["admissible"] = ok;
  report["conditions"] = conds;

  if (ok) {
    std::optional<int> dim;
    if (ctx.cfg.grid) dim = ctx.cfg.grid->d;
    const auto z = zone_classify(params, dim);
    ctx.out << "zone\n";
    put("zone", to_string(z.zone));
    put("lebesgue upper", fmt(z.lebesgue_upper));
    put("v Sobolev regularized", fmt(z.v_sobolev));
    put("t_v", fmt(z.t_v));
    for (const auto& t : z.near_thresholds) put("near threshold", t);
    if (z.dimension_mismatch) put("warning", "grid dimension differs from N");
    report["zone"] = zone_json(z);
  }
  w.write_csv("zones.csv", csv);
  return ok ? kExitOk : kExitInadmissible;
}

// check-nl ------------------------------------------------------------------

Json sample_json(const GrowthSampler::Sample& s, int dim) {
  Json x = Json::array();
  for (int a = 0; a < dim; ++a) x.push_back(s.x[static_cast<std::size_t>(a)]);
  return {{"x", x}, {"s", s.s}, {"t", s.t}};
}

int cmd_check_nl(const Context& ctx, ArtifactWriter&, Json& report) {
  const auto& nl = require(ctx.cfg.nonlinearity, "nonlinearity", ctx.command);
  const auto& params = require(ctx.cfg.problem, "problem", ctx.command);
  if (!ctx.cfg.seed) throw ConfigError("command 'check-nl' needs a top-level seed");
  const auto spec = make_spec(nl, params);
  const int dim = ctx.cfg.grid ? ctx.cfg.grid->d : 3;
  GrowthSampler sampler(SplitRng(*ctx.cfg.seed).split(1), dim, nl.log10_lo, nl.log10_hi);
  const auto rep = verify_growth_bounds(spec, sampler, nl.samples);

  Json checks = Json::array();
  ctx.out << "growth bounds for " << spec.kind_name() << " (" << rep.samples << " samples)\n";
  for (const auto& c : rep.checks) {
    Json j = {{"name", c.name}, {"bound", c.bound}, {"claimed", c.claimed},
              {"worst_ratio", number_json(c.worst_ratio)}, {"evaluated", c.evaluated},
              {"passed", c.passed}};
    if (c.witness) {
      j["witness"] = sample_json(*c.witness, dim);
      j["witness_ratio"] = number_json(c.witness_ratio);
    }
    checks.push_back(j);
    std::string line = std::string(c.passed ? "PASS" : "FAIL") + "  claimed " + fmt(c.claimed) +
                       "  worst ratio " + fmt(c.worst_ratio);
    if (c.witness) {
      line += "  witness s=" + fmt(c.witness->s) + " t=" + fmt(c.witness->t);
    }
    table_row(ctx.out, c.name + " (" + c.bound + ")", line);
  }
  report["spec"] = spec.kind_name();
  report["samples"] = rep.samples;
  report["checks"] = checks;
  report["all_passed"] = rep.all_passed();
  return rep.all_passed() ? kExitOk : kExitHypothesis;
}

// solve ---------------------------------------------------------------------

int cmd_solve(const Context& ctx, ArtifactWriter& w, Json& report) {
  const auto& params = require(ctx.cfg.problem, "problem", ctx.command);
  const auto& nl = require(ctx.cfg.nonlinearity, "nonlinearity", ctx.command);
  const auto& grid = require(ctx.cfg.grid, "grid", ctx.command);
  const auto& datum = require(ctx.cfg.datum, "datum", ctx.command);
  const auto& solve = require(ctx.cfg.solve, "solve", ctx.command);
  if (!admissible_or_report(ctx, params)) return kExitInadmissible;

  const auto spec = make_spec(nl, params);
  const Field f = sample(datum, grid.make());
  const auto res = picard_system_solve(f, spec, params, solve);

  print_solve_summary(ctx.out, res);
  w.write_field("fields/u.csv", res.u);
  w.write_field("fields/v.csv", res.v);
  w.write_field("fields/f.csv", f);
  w.write_csv("history.csv", history_csv(res));

  Json result = solve_json(res);
  result["weak_residual1"] =
      weak_residual_dual_norm(res.u, res.v, f, spec, params, Equation::First, solve.k, res.eps_final);
  result["weak_residual2"] =
      weak_residual_dual_norm(res.u, res.v, f, spec, params, Equation::Second, solve.k, res.eps_final);
  report["spec"] = spec.kind_name();
  report["result"] = result;

  if (ctx.cfg.sweep && ctx.cfg.sweep->t) {
    const auto lv = linf_report(res, f, params, *ctx.cfg.sweep->t, solve.k);
    report["linf"] = {{"applicable", lv.applicable}, {"verdict", lv.verdict},
                      {"max_u", lv.max_u}, {"max_v", lv.max_v}, {"datum_norm", lv.datum_norm},
                      {"shape", lv.shape}, {"ratio_u", lv.ratio_u}, {"ratio_v", lv.ratio_v}};
  }
  if (ctx.cfg.sweep && !ctx.cfg.sweep->n_grid.empty()) {
    const auto& ns = ctx.cfg.sweep->n_grid;
    const Field fk = truncated_datum(f, solve.k);
    CsvTable tails({"product", "n", "value", "majorant"});
    for (auto which : {TailProduct::GU, TailProduct::HV, TailProduct::G, TailProduct::H}) {
      const auto tab = tail_uniform_integrability(spec, res.u, res.v, ns, which, &fk);
      for (const auto& row : tab.rows) {
        tails.row({to_string(which), fmt(row.n), fmt(row.value),
                   row.majorant ? fmt(*row.majorant) : std::string()});
      }
    }
    w.write_csv("tails.csv", tails);
    if (f.min_value() >= 0.0) {
      const auto chain = proof_chain_check(spec, res.u, res.v, fk, spec.claimed().c1, ns);
      Json rows = Json::array();
      for (const auto& r : chain.rows) {
        rows.push_back({{"n", r.n}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ok", r.ok}});
      }
      report["proof_chain"] = {{"rows", rows}, {"mixed_lhs", chain.mixed_lhs},
                               {"mixed_rhs", chain.mixed_rhs}, {"mixed_ok", chain.mixed_ok},
                               {"tolerance", chain.tolerance}, {"all_ok", chain.all_ok()}};
      table_row(ctx.out, "proof chain", chain.all_ok() ? "ok" : "VIOLATED");
    }
  }
  return res.converged ? kExitOk : kExitNonConvergence;
}

// sweep ---------------------------------------------------------------------

Json estimate_json(const EstimateReport& rep) {
  Json slopes = Json::array();
  for (const auto& s : rep.slopes) {
    slopes.push_back({{"name", s.name}, {"fit", fit_json(s.fit)}, {"target", s.target},
                      {"slack", s.slack}, {"verdict", to_string(s.verdict)}});
  }
  Json j = {{"applicable", rep.applicable}, {"overall", to_string(rep.overall)},
            {"sigma", rep.sigma}, {"inv_p_minus_1", rep.inv_p_minus_1},
            {"energy_exponent", rep.energy_exponent}, {"slopes", slopes}};
  if (rep.zone) j["zone"] = zone_json(*rep.zone);
  return j;
}

CsvTable sweep_csv(const EstimateReport& rep) {
  CsvTable t({"lambda", "converged", "status", "u_coupling_norm", "u_w1p", "v_w1p", "mixed",
              "max_u", "max_v", "A_k", "residual1", "residual2"});
  for (const auto& p : rep.points) {
    t.row({fmt(p.lambda), fmt(p.converged), p.status, fmt(p.u_coupling_norm), fmt(p.u_w1p),
           fmt(p.v_w1p), fmt(p.mixed), fmt(p.max_u), fmt(p.max_v), fmt(p.A_k), fmt(p.residual1),
           fmt(p.residual2)});
  }
  return t;
}

int cmd_sweep(const Context& ctx, ArtifactWriter& w, Json& report) {
  const auto& params = require(ctx.cfg.problem, "problem", ctx.command);
  const auto& grid = require(ctx.cfg.grid, "grid", ctx.command);
  const auto& datum = require(ctx.cfg.datum, "datum", ctx.command);
  const auto& solve = require(ctx.cfg.solve, "solve", ctx.command);
  const auto& sweep = require(ctx.cfg.sweep, "sweep", ctx.command);
  if (sweep.lambda.size() < kMinSweepPoints) {
    throw InsufficientSweep("sweep needs at least " + std::to_string(kMinSweepPoints) +
                            " lambda values, got " + std::to_string(sweep.lambda.size()));
  }
  const Field f0 = sample(datum, grid.make());

  EstimateReport rep;
  if (sweep.mode == "linf") {
    if (!sweep.t) throw ConfigError("sweep mode 'linf' needs 'sweep.t'");
    rep = linf_scaling_probe(f0, sweep.lambda, *sweep.t, params.p(), params.N(), solve, sweep.slack);
  } else {
    const auto& nl = require(ctx.cfg.nonlinearity, "nonlinearity", ctx.command);
    if (!admissible_or_report(ctx, params)) return kExitInadmissible;
    try {
      rep = apriori_scaling_sweep(f0, sweep.lambda, make_spec(nl, params), params, solve, sweep.slack);
    } catch (const InsufficientSweep& e) {
      ctx.err << "non-convergence: " << e.what() << "\n";
      report["error"] = e.what();
      return kExitNonConvergence;
    }
  }

  for (const auto& s : rep.slopes) {
    table_row(ctx.out, s.name, to_string(s.verdict) + "  slope " + fmt(s.fit.slope) +
                                   "  target " + fmt(s.target) + "  residual " +
                                   fmt(s.fit.rms_residual));
  }
  table_row(ctx.out, "overall", to_string(rep.overall));
  w.write_csv("sweep.csv", sweep_csv(rep));
  report["mode"] = sweep.mode;
  report["estimate"] = estimate_json(rep);
  const bool all = std::all_of(rep.points.begin(), rep.points.end(),
                               [](const SweepPoint& p) { return p.converged; });
  return all ? kExitOk : kExitNonConvergence;
}

// continuation ----------------------------------------------------------------

int cmd_continuation(const Context& ctx, ArtifactWriter& w, Json& report) {
  const auto& params = require(ctx.cfg.problem, "problem", ctx.command);
  const auto& nl = require(ctx.cfg.nonlinearity, "nonlinearity", ctx.command);
  const auto& grid = require(ctx.cfg.grid, "grid", ctx.command);
  const auto& datum = require(ctx.cfg.datum, "datum", ctx.command);
  const auto& solve = require(ctx.cfg.solve, "solve", ctx.command);
  const auto& sweep = require(ctx.cfg.sweep, "sweep", ctx.command);
  if (sweep.k_schedule.size() < 2) throw ConfigError("continuation needs at least two k values");
  if (!admissible_or_report(ctx, params)) return kExitInadmissible;

  const Field f = sample(datum, grid.make());
  const auto cont = k_continuation(f, make_spec(nl, params), params, sweep.k_schedule, solve);

  CsvTable stages({"k", "converged", "status", "iterations", "A_k", "residual1", "residual2",
                   "min_u", "min_v", "possibly_degenerate"});
  Json jstages = Json::array();
  for (const auto& s : cont.stages) {
    stages.row({fmt(s.k), fmt(s.converged), to_string(s.status), std::to_string(s.iterations),
                fmt(s.A_k), fmt(s.residual1), fmt(s.residual2), fmt(s.min_u), fmt(s.min_v),
                fmt(s.possibly_degenerate)});
    jstages.push_back(solve_json(s));
    table_row(ctx.out, "k = " + fmt(s.k), to_string(s.status) + "  A_k " + fmt(s.A_k));
  }
  CsvTable cauchy({"k_from", "k_to", "du", "dv", "A_from", "A_to"});
  Json jc = Json::array();
  for (const auto& c : cont.cauchy) {
    cauchy.row({fmt(c.k_from), fmt(c.k_to), fmt(c.du), fmt(c.dv), fmt(c.A_from), fmt(c.A_to)});
    jc.push_back({{"k_from", c.k_from}, {"k_to", c.k_to}, {"du", c.du}, {"dv", c.dv},
                  {"A_from", c.A_from}, {"A_to", c.A_to}});
    table_row(ctx.out, "cauchy " + fmt(c.k_from) + " -> " + fmt(c.k_to),
              "du " + fmt(c.du) + "  dv " + fmt(c.dv));
  }
  w.write_csv("stages.csv", stages);
  w.write_csv("cauchy.csv", cauchy);
  if (!cont.stages.empty()) {
    w.write_field("fields/u.csv", cont.stages.back().u);
    w.write_field("fields/v.csv", cont.stages.back().v);
  }
  report["stages"] = jstages;
  report["cauchy"] = jc;
  report["all_converged"] = cont.all_converged();
  return cont.all_converged() ? kExitOk : kExitNonConvergence;
}

// probe -----------------------------------------------------------------------

int probe_nontriviality(const Context& ctx, ArtifactWriter& w, Json& report) {
  const auto& params = require(ctx.cfg.problem, "problem", ctx.command);
  const auto& nl = require(ctx.cfg.nonlinearity, "nonlinearity", ctx.command);
  const auto& grid = require(ctx.cfg.grid, "grid", ctx.command);
  const auto& datum = require(ctx.cfg.datum, "datum", ctx.command);
  const auto& solve = require(ctx.cfg.solve, "solve", ctx.command);
  const auto& probe = *ctx.cfg.probe;
  if (probe.levels.size() < 2) throw ConfigError("nontriviality probe needs at least two levels");
  if (!admissible_or_report(ctx, params)) return kExitInadmissible;

  const auto rep = nontriviality_check(datum, make_spec(nl, params), params, grid.d, probe.levels, solve);
  CsvTable levels({"n", "l1_u", "l1_v", "converged", "status", "A_k"});
  Json rows = Json::array();
  bool all = true;
  for (const auto& r : rep.rows) {
    levels.row({std::to_string(r.n), fmt(r.l1_u), fmt(r.l1_v), fmt(r.converged), r.status, fmt(r.A_k)});
    rows.push_back({{"n", r.n}, {"l1_u", r.l1_u}, {"l1_v", r.l1_v}, {"converged", r.converged},
                    {"status", r.status}, {"A_k", r.A_k}});
    table_row(ctx.out, "n = " + std::to_string(r.n),
              "L1(u) " + fmt(r.l1_u) + "  L1(v) " + fmt(r.l1_v) + "  " + r.status);
    all = all && r.converged;
  }
  table_row(ctx.out, "verdict u / v", to_string(rep.verdict_u) + " / " + to_string(rep.verdict_v));
  table_row(ctx.out, "overall", to_string(rep.overall));
  w.write_csv("levels.csv", levels);
  report["rows"] = rows;
  report["floor_u"] = rep.floor_u;
  report["floor_v"] = rep.floor_v;
  report["verdict_u"] = to_string(rep.verdict_u);
  report["verdict_v"] = to_string(rep.verdict_v);
  report["overall"] = to_string(rep.overall);
  if (rep.datum_in_Lm) report["datum_in_Lm"] = *rep.datum_in_Lm;
  if (rep.datum_outside_Lpstar_conj) report["datum_outside_Lpstar_conj"] = *rep.datum_outside_Lpstar_conj;
  return all ? kExitOk : kExitNonConvergence;
}

int probe_regularity(const Context& ctx, ArtifactWriter& w, Json& report) {
  const auto& params = require(ctx.cfg.problem, "problem", ctx.command);
  const auto& nl = require(ctx.cfg.nonlinearity, "nonlinearity", ctx.command);
  const auto& grid = require(ctx.cfg.grid, "grid", ctx.command);
  const auto& datum = require(ctx.cfg.datum, "datum", ctx.command);
  const auto& solve = require(ctx.cfg.solve, "solve", ctx.command);
  const auto& probe = *ctx.cfg.probe;
  if (probe.q_grid.empty()) throw ConfigError("regularity probe needs 'probe.q_grid'");
  if (!admissible_or_report(ctx, params)) return kExitInadmissible;

  const double q_max =
      2.0 * std::max(sobolev_conjugate(params.p(), params.N()), params.coupling_exponent());
  for (double q : probe.q_grid) {
    if (!(q > 1.0 && q < q_max)) {
      throw ConfigError("'probe.q_grid' entries must lie in (1, " + fmt(q_max) + ")");
    }
  }
  const Field f = sample(datum, grid.make());
  const auto res = picard_system_solve(f, make_spec(nl, params), params, solve);
  print_solve_summary(ctx.out, res);
  w.write_field("fields/u.csv", res.u);
  w.write_field("fields/v.csv", res.v);

  const auto rep = regularity_probe(res.u, probe.q_grid, q_max);
  CsvTable norms({"q", "norm"});
  for (const auto& [q, n] : rep.norms) norms.row({fmt(q), fmt(n)});
  CsvTable levels({"lambda", "measure"});
  for (const auto& [l, m] : rep.levels) levels.row({fmt(l), fmt(m)});
  w.write_csv("norms.csv", norms);
  w.write_csv("levels.csv", levels);

  table_row(ctx.out, "tail fit", rep.verdict);
  if (rep.fit) table_row(ctx.out, "tail exponent", fmt(rep.tail_exponent));
  table_row(ctx.out, "resolvable lambda range", fmt(rep.lambda_min) + " .. " + fmt(rep.lambda_max));
  report["solve"] = solve_json(res);
  report["verdict"] = rep.verdict;
  report["tail_exponent"] = number_json(rep.tail_exponent);
  if (rep.fit) report["fit"] = fit_json(*rep.fit);
  report["lambda_min"] = rep.lambda_min;
  report["lambda_max"] = rep.lambda_max;
  if (params.m() < params.N() / params.p()) {
    report["m_double_star_p"] = regularized_exponents(params.m(), params.p(), params.N()).double_star;
  }
  report["coupling_exponent"] = params.coupling_exponent();
  return res.converged ? kExitOk : kExitNonConvergence;
}

int cmd_probe(const Context& ctx, ArtifactWriter& w, Json& report) {
  const auto& probe = require(ctx.cfg.probe, "probe", ctx.command);
  report["kind"] = probe.kind;
  if (probe.kind == "regularity") return probe_regularity(ctx, w, report);
  return probe_nontriviality(ctx, w, report);
}

using Handler = std::function<int(const Context&, ArtifactWriter&, Json&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"zones", cmd_zones},       {"check-nl", cmd_check_nl},         {"solve", cmd_solve},
      {"sweep", cmd_sweep},       {"continuation", cmd_continuation}, {"probe", cmd_probe}};
  return h;
}

} // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"zones", "check-nl", "solve",
                                                 "sweep", "continuation", "probe"};
  return names;
}

int run_command(const std::string& command, RunConfig config, const CommandOptions& options,
                std::ostream& out, std::ostream& err) {
  const auto it = handlers().find(command);
  if (it == handlers().end()) {
    err << "unknown command '" << command << "'\n";
    return kExitConfig;
  }
  if (options.outdir) config.io.outdir = *options.outdir;
  if (options.label) config.io.label = *options.label;
  if (config.io.label.empty()) config.io.label = command;

  const Context ctx{config, out, err, command, config.io.outdir, config.io.label};
  std::optional<ArtifactWriter> writer;
  Json report = Json::object();
  report["command"] = command;
  report["seed"] = config.seed_or_default();
  int code = kExitOk;
  try {
    writer.emplace(config.io.outdir, config.io.label);
    code = it->second(ctx, *writer, report);
  } catch (const InsufficientSweep& e) {
    err << "error: InsufficientSweep: " << e.what() << "\n";
    code = kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n"
        << "usage: kmslab " << command << " --config <path> [--outdir <path>] [--label <name>]\n";
    code = kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    code = kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kExitConfig;
  }
  if (writer) {
    try {
      report["exit_code"] = code;
      writer->write_json("report.json", report);
      const auto manifest = writer->finalize(config.echo(), command, code);
      out << "manifest: " << manifest.string() << "\n";
    } catch (const std::exception& e) {
      err << "error writing artifacts: " << e.what() << "\n";
      if (code == kExitOk) code = kExitConfig;
    }
  }
  out.flush();
  return code;
}

int run_command_file(const std::string& command, const std::filesystem::path& config_path,
                     const CommandOptions& options, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_run_config(config_path);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n"
        << "usage: kmslab " << command << " --config <path> [--outdir <path>] [--label <name>]\n";
    return kExitConfig;
  }
  return run_command(command, std::move(cfg), options, out, err);
}

} // namespace kmslab::cli
