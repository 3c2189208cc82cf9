#pragma once

#include "kmslab/datum.hpp"
#include "kmslab/exponents.hpp"
#include "kmslab/grid.hpp"
#include "kmslab/nonlinearity.hpp"
#include "kmslab/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kmslab::cli {

struct GridConfig {
  int d = 1;
  std::array<int, 3> n{33, 33, 33};
  Point lower{0.0, 0.0, 0.0};
  Point upper{1.0, 1.0, 1.0};
  GridPtr make() const;
};

struct NonlinearityConfig {
  std::string kind = "prototype";  ///< prototype | weighted_oscillatory | zero | sign_violating
  double w1 = 1.0;
  double w2 = 1.0;
  std::size_t samples = 10000;
  double log10_lo = -2.0;
  double log10_hi = 2.0;
};

struct SweepConfig {
  std::string mode = "apriori";  ///< apriori | linf
  std::vector<double> lambda;
  std::vector<double> k_schedule;
  std::vector<double> n_grid;
  double slack = 0.1;
  std::optional<double> t;
};

struct ProbeConfig {
  std::string kind = "nontriviality";  ///< nontriviality | regularity
  std::vector<int> levels;
  std::vector<double> q_grid;
};

struct IoConfig {
  std::string outdir = "out";
  std::string label;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::optional<ProblemParams> problem;
  std::optional<NonlinearityConfig> nonlinearity;
  std::optional<GridConfig> grid;
  std::optional<DatumSpec> datum;
  std::optional<SolveConfig> solve;
  std::optional<SweepConfig> sweep;
  std::optional<ProbeConfig> probe;
  IoConfig io;

  std::uint64_t seed_or_default() const { return seed.value_or(0); }
  /// Normalized echo of every parsed value.
  nlohmann::ordered_json echo() const;
};

/// Throws ConfigError on malformed TOML, unknown keys, wrong types, or values
/// rejected by the library constructors.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Spec for the configured kind with r and theta taken from the problem section.
NonlinearitySpec make_spec(const NonlinearityConfig& nl, const ProblemParams& problem);

} // namespace kmslab::cli
