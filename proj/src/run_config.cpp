#include "kmslab/cli/run_config.hpp"

#include "kmslab/error.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace kmslab::cli {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const toml::table& table, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, node] : table) {
    (void)node;
    const auto k = key.str();
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      fail("unknown key '" + std::string(k) + "' in " + where);
    }
  }
}

const toml::table* section(const toml::table& root, const char* name) {
  const auto* node = root.get(name);
  if (!node) return nullptr;
  const auto* t = node->as_table();
  if (!t) fail(std::string("'") + name + "' must be a table");
  return t;
}

std::string path_of(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

double get_number(const toml::table& t, const std::string& where, std::string_view key) {
  const auto* node = t.get(key);
  if (!node) fail("missing key '" + path_of(where, key) + "'");
  if (const auto v = node->value<double>(); v && (node->is_integer() || node->is_floating_point())) {
    return *v;
  }
  fail("'" + path_of(where, key) + "' must be a number");
}

double number_or(const toml::table& t, const std::string& where, std::string_view key, double fallback) {
  return t.contains(key) ? get_number(t, where, key) : fallback;
}

long long integer_or(const toml::table& t, const std::string& where, std::string_view key,
                     long long fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (!node->is_integer()) fail("'" + path_of(where, key) + "' must be an integer");
  return *node->value<long long>();
}

std::string string_or(const toml::table& t, const std::string& where, std::string_view key,
                      const std::string& fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (!node->is_string()) fail("'" + path_of(where, key) + "' must be a string");
  return *node->value<std::string>();
}

std::vector<double> number_array(const toml::table& t, const std::string& where,
                                 std::string_view key) {
  const auto* node = t.get(key);
  if (!node) return {};
  const auto* arr = node->as_array();
  if (!arr) fail("'" + path_of(where, key) + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& el : *arr) {
    if (!(el.is_integer() || el.is_floating_point())) {
      fail("'" + path_of(where, key) + "' must be an array of numbers");
    }
    out.push_back(*el.value<double>());
  }
  return out;
}

Point point_or(const toml::table& t, const std::string& where, std::string_view key, Point fallback) {
  if (!t.contains(key)) return fallback;
  const auto v = number_array(t, where, key);
  if (v.empty() || v.size() > 3) fail("'" + path_of(where, key) + "' needs 1 to 3 entries");
  Point p = fallback;
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
  return p;
}

ProblemParams parse_problem(const toml::table& t) {
  check_keys(t, "[problem]", {"N", "p", "r", "theta", "m", "c1", "c2", "d1", "d2"});
  const std::string w = "problem";
  return ProblemParams(get_number(t, w, "N"), get_number(t, w, "p"), get_number(t, w, "r"),
                       get_number(t, w, "theta"), get_number(t, w, "m"),
                       number_or(t, w, "c1", 1.0), number_or(t, w, "c2", 1.0),
                       number_or(t, w, "d1", 1.0), number_or(t, w, "d2", 1.0));
}

NonlinearityConfig parse_nonlinearity(const toml::table& t) {
  check_keys(t, "[nonlinearity]", {"kind", "w1", "w2", "samples", "log10_lo", "log10_hi"});
  const std::string w = "nonlinearity";
  NonlinearityConfig nl;
  nl.kind = string_or(t, w, "kind", nl.kind);
  if (nl.kind != "prototype" && nl.kind != "weighted_oscillatory" && nl.kind != "zero" &&
      nl.kind != "sign_violating") {
    fail("unknown nonlinearity kind '" + nl.kind + "'");
  }
  nl.w1 = number_or(t, w, "w1", nl.w1);
  nl.w2 = number_or(t, w, "w2", nl.w2);
  const auto samples = integer_or(t, w, "samples", static_cast<long long>(nl.samples));
  if (samples <= 0) fail("'nonlinearity.samples' must be positive");
  nl.samples = static_cast<std::size_t>(samples);
  nl.log10_lo = number_or(t, w, "log10_lo", nl.log10_lo);
  nl.log10_hi = number_or(t, w, "log10_hi", nl.log10_hi);
  if (!(nl.log10_hi - nl.log10_lo >= 4.0)) fail("nonlinearity sampling needs at least 4 decades");
  return nl;
}

GridConfig parse_grid(const toml::table& t) {
  check_keys(t, "[grid]", {"d", "n", "lower", "upper"});
  const std::string w = "grid";
  GridConfig g;
  g.d = static_cast<int>(integer_or(t, w, "d", g.d));
  if (g.d < 1 || g.d > 3) fail("'grid.d' must be 1, 2 or 3");
  if (const auto* node = t.get("n"); node && node->is_array()) {
    const auto* arr = node->as_array();
    if (arr->size() != static_cast<std::size_t>(g.d)) fail("'grid.n' needs one entry per axis");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (!(*arr)[i].is_integer()) fail("'grid.n' entries must be integers");
      g.n[i] = static_cast<int>(*(*arr)[i].value<long long>());
    }
  } else {
    const int n = static_cast<int>(integer_or(t, w, "n", g.n[0]));
    g.n = {n, n, n};
  }
  g.lower = point_or(t, w, "lower", g.lower);
  g.upper = point_or(t, w, "upper", g.upper);
  (void)g.make();
  return g;
}

DatumSpec parse_datum(const toml::table& t) {
  check_keys(t, "[datum]", {"kind", "amplitude", "frequency", "center", "gamma"});
  const std::string w = "datum";
  DatumSpec d;
  d.kind = parse_datum_kind(string_or(t, w, "kind", "constant"));
  d.amplitude = number_or(t, w, "amplitude", d.amplitude);
  d.frequency = number_or(t, w, "frequency", d.frequency);
  d.center = point_or(t, w, "center", d.center);
  d.gamma = number_or(t, w, "gamma", d.gamma);
  if (d.kind == DatumSpec::Kind::Singular && !(d.gamma > 0.0)) fail("'datum.gamma' must be positive");
  return d;
}

SolveConfig parse_solve(const toml::table& t) {
  check_keys(t, "[solve]", {"k", "eps_schedule", "outer_tol", "inner_tol", "max_outer",
                            "max_inner", "relax", "tol_pos"});
  const std::string w = "solve";
  SolveConfig c;
  c.k = number_or(t, w, "k", c.k);
  c.eps_schedule = number_array(t, w, "eps_schedule");
  c.outer_tol = number_or(t, w, "outer_tol", c.outer_tol);
  c.inner_tol = number_or(t, w, "inner_tol", c.inner_tol);
  c.max_outer = static_cast<int>(integer_or(t, w, "max_outer", c.max_outer));
  c.max_inner = static_cast<int>(integer_or(t, w, "max_inner", c.max_inner));
  c.relax = number_or(t, w, "relax", c.relax);
  c.tol_pos = number_or(t, w, "tol_pos", c.tol_pos);
  c.validate();
  return c;
}

SweepConfig parse_sweep(const toml::table& t) {
  check_keys(t, "[sweep]", {"mode", "lambda", "k_schedule", "n_grid", "slack", "t"});
  const std::string w = "sweep";
  SweepConfig s;
  s.mode = string_or(t, w, "mode", s.mode);
  if (s.mode != "apriori" && s.mode != "linf") fail("'sweep.mode' must be apriori or linf");
  s.lambda = number_array(t, w, "lambda");
  s.k_schedule = number_array(t, w, "k_schedule");
  s.n_grid = number_array(t, w, "n_grid");
  s.slack = number_or(t, w, "slack", s.slack);
  if (t.contains("t")) s.t = get_number(t, w, "t");
  for (double l : s.lambda) {
    if (!(l > 0.0)) fail("'sweep.lambda' entries must be positive");
  }
  return s;
}

ProbeConfig parse_probe(const toml::table& t) {
  check_keys(t, "[probe]", {"kind", "levels", "q_grid"});
  const std::string w = "probe";
  ProbeConfig p;
  p.kind = string_or(t, w, "kind", p.kind);
  if (p.kind != "nontriviality" && p.kind != "regularity") {
    fail("'probe.kind' must be nontriviality or regularity");
  }
  for (double l : number_array(t, w, "levels")) {
    if (l != static_cast<int>(l) || l < 3) fail("'probe.levels' entries must be integers >= 3");
    p.levels.push_back(static_cast<int>(l));
  }
  p.q_grid = number_array(t, w, "q_grid");
  return p;
}

IoConfig parse_io(const toml::table& t) {
  check_keys(t, "[io]", {"outdir", "label"});
  IoConfig io;
  io.outdir = string_or(t, "io", "outdir", io.outdir);
  io.label = string_or(t, "io", "label", io.label);
  return io;
}

Json point_json(const Point& p, int d) {
  Json a = Json::array();
  for (int i = 0; i < d; ++i) a.push_back(p[static_cast<std::size_t>(i)]);
  return a;
}

} // namespace

GridPtr GridConfig::make() const {
  std::array<int, 3> counts{1, 1, 1};
  for (int i = 0; i < d; ++i) counts[static_cast<std::size_t>(i)] = n[static_cast<std::size_t>(i)];
  return std::make_shared<const Grid>(d, counts, lower, upper);
}

RunConfig parse_run_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "malformed TOML at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
  check_keys(root, "top level",
             {"seed", "problem", "nonlinearity", "grid", "datum", "solve", "sweep", "probe", "io"});

  RunConfig cfg;
  try {
    if (root.contains("seed")) {
      const auto seed = integer_or(root, "", "seed", 0);
      if (seed < 0) fail("'seed' must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(seed);
    }
    if (const auto* t = section(root, "problem")) cfg.problem = parse_problem(*t);
    if (const auto* t = section(root, "nonlinearity")) cfg.nonlinearity = parse_nonlinearity(*t);
    if (const auto* t = section(root, "grid")) cfg.grid = parse_grid(*t);
    if (const auto* t = section(root, "datum")) cfg.datum = parse_datum(*t);
    if (const auto* t = section(root, "solve")) cfg.solve = parse_solve(*t);
    if (const auto* t = section(root, "sweep")) cfg.sweep = parse_sweep(*t);
    if (const auto* t = section(root, "probe")) cfg.probe = parse_probe(*t);
    if (const auto* t = section(root, "io")) cfg.io = parse_io(*t);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_run_config(os.str());
}

NonlinearitySpec make_spec(const NonlinearityConfig& nl, const ProblemParams& problem) {
  const double r = problem.r(), theta = problem.theta();
  if (nl.kind == "prototype") return NonlinearitySpec::prototype(r, theta);
  if (nl.kind == "weighted_oscillatory") return NonlinearitySpec::weighted_oscillatory(r, theta, nl.w1, nl.w2);
  if (nl.kind == "zero") return NonlinearitySpec::zero_coupling(r, theta);
  if (nl.kind == "sign_violating") return NonlinearitySpec::sign_violating(r, theta);
  throw ConfigError("unknown nonlinearity kind '" + nl.kind + "'");
}

nlohmann::ordered_json RunConfig::echo() const {
  Json j = Json::object();
  if (seed) j["seed"] = *seed;
  if (problem) {
    const auto& p = *problem;
    j["problem"] = {{"N", p.N()}, {"p", p.p()}, {"r", p.r()}, {"theta", p.theta()}, {"m", p.m()},
                    {"c1", p.c1()}, {"c2", p.c2()}, {"d1", p.d1()}, {"d2", p.d2()}};
  }
  if (nonlinearity) {
    const auto& n = *nonlinearity;
    j["nonlinearity"] = {{"kind", n.kind}, {"w1", n.w1}, {"w2", n.w2}, {"samples", n.samples},
                         {"log10_lo", n.log10_lo}, {"log10_hi", n.log10_hi}};
  }
  if (grid) {
    const auto& g = *grid;
    Json n = Json::array();
    for (int i = 0; i < g.d; ++i) n.push_back(g.n[static_cast<std::size_t>(i)]);
    j["grid"] = {{"d", g.d}, {"n", n}, {"lower", point_json(g.lower, g.d)},
                 {"upper", point_json(g.upper, g.d)}};
  }
  if (datum) {
    const auto& d = *datum;
    j["datum"] = {{"kind", d.kind_name()}, {"amplitude", d.amplitude}, {"frequency", d.frequency},
                  {"center", point_json(d.center, 3)}, {"gamma", d.gamma}};
  }
  if (solve) {
    const auto& s = *solve;
    j["solve"] = {{"k", s.k}, {"eps_schedule", s.eps_schedule}, {"outer_tol", s.outer_tol},
                  {"inner_tol", s.inner_tol}, {"max_outer", s.max_outer},
                  {"max_inner", s.max_inner}, {"relax", s.relax}, {"tol_pos", s.tol_pos}};
  }
  if (sweep) {
    const auto& s = *sweep;
    j["sweep"] = {{"mode", s.mode}, {"lambda", s.lambda}, {"k_schedule", s.k_schedule},
                  {"n_grid", s.n_grid}, {"slack", s.slack}};
    if (s.t) j["sweep"]["t"] = *s.t;
  }
  if (probe) {
    const auto& p = *probe;
    j["probe"] = {{"kind", p.kind}, {"levels", p.levels}, {"q_grid", p.q_grid}};
  }
  j["io"] = {{"outdir", io.outdir}, {"label", io.label}};
  return j;
}

} // namespace kmslab::cli
