#include "helpers.hpp"

#include "kmslab/datum.hpp"
#include "kmslab/error.hpp"
#include "kmslab/solver.hpp"

#include <numbers>

using namespace kmslab;
using kmslab::testing::RelNear;

namespace {

constexpr double kPi = std::numbers::pi;
const ProblemParams kParams(3, 2, 2, 0.5, 1.3);
const ProblemParams kCubic(4, 3, 2, 0.5, 1.2);

double l2_error(const Field& u, double (*exact)(double)) {
  std::vector<double> diff(u.values().begin(), u.values().end());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= exact(u.grid().node_position(i)[0]);
  return lq_norm(u.grid(), diff, 2.0);
}

SolveResult acceptance_solve(int n = 129, double relax = 0.5) {
  auto g = make_grid(1, n);
  SolveConfig cfg;
  cfg.k = 10;
  cfg.relax = relax;
  return picard_system_solve(Field::constant(g, 1.0), NonlinearitySpec::prototype(2, 0.5), kParams, cfg);
}

} // namespace

TEST(SolveConfig, Validation) {
  SolveConfig c;
  EXPECT_NO_THROW(c.validate());
  c.relax = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolveConfig{};
  c.eps_schedule = {1e-2, 1e-2};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolveConfig{};
  c.k = -1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  EXPECT_EQ(default_eps_schedule(2.0), std::vector<double>{0.0});
  EXPECT_EQ(default_eps_schedule(3.0).back(), 1e-8);
}

TEST(InnerSolve, ManufacturedSineQuadraticRate) {
  std::vector<double> errs;
  for (int n : {33, 65, 129, 257}) {
    auto g = make_grid(1, n);
    const Field src = Field::sample(g, [](const Point& x) { return kPi * kPi * std::sin(kPi * x[0]); });
    const auto rep = inner_scalar_solve(1.0, Field(g), Equation::First, src,
                                        NonlinearitySpec::prototype(2, 0.5), kParams, SolveConfig{});
    ASSERT_TRUE(rep.converged());
    errs.push_back(l2_error(rep.solution, [](double x) { return std::sin(kPi * x); }));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    EXPECT_NEAR(std::log2(errs[i - 1] / errs[i]), 2.0, 0.2);
  }
}

TEST(InnerSolve, ManufacturedCubicFluxDecreases) {
  double prev = 1e300;
  for (int n : {33, 65, 129}) {
    auto g = make_grid(1, n);
    const Field src = Field::sample(g, [](const Point& x) { return 4.0 * std::abs(1 - 2 * x[0]); });
    const auto rep = inner_scalar_solve(1.0, Field(g), Equation::First, src,
                                        NonlinearitySpec::prototype(2, 0.5), kCubic, SolveConfig{});
    ASSERT_TRUE(rep.converged()) << to_string(rep.status);
    EXPECT_EQ(rep.eps, 1e-8);
    const double err = l2_error(rep.solution, [](double x) { return x * (1 - x); });
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(InnerSolve, ZeroDatumZeroSolution) {
  auto g = make_grid(2, 9);
  for (const auto* params : {&kParams, &kCubic}) {
    const auto rep = inner_scalar_solve(1.0, Field(g), Equation::First, Field(g),
                                        NonlinearitySpec::prototype(2, 0.5), *params, SolveConfig{});
    EXPECT_TRUE(rep.converged());
    EXPECT_EQ(rep.solution.max_abs(), 0.0);
  }
}

TEST(InnerSolve, LinearScaling) {
  auto g = make_grid(1, 65);
  const Field src = Field::sample(g, [](const Point& x) { return 1.0 + x[0]; });
  const auto spec = NonlinearitySpec::zero_coupling(2, 0.5);
  const auto a = inner_scalar_solve(0.8, Field(g), Equation::First, src, spec, kParams, SolveConfig{});
  const auto b = inner_scalar_solve(0.8, Field(g), Equation::First, src * 2.0, spec, kParams, SolveConfig{});
  ASSERT_TRUE(a.converged() && b.converged());
  for (std::size_t i = 0; i < a.solution.size(); ++i) {
    EXPECT_NEAR(b.solution[i], 2.0 * a.solution[i], 1e-10);
  }
}

TEST(InnerSolve, EnergyDescentPrototype) {
  SplitRng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 1 + trial % 2;
    auto g = make_grid(d, d == 1 ? 65 : 17);
    const Field partner = Field::sample(g, [&](const Point&) { return rng.uniform(0.0, 2.0); });
    const Field src = Field::sample(g, [&](const Point&) { return rng.uniform(0.0, 20.0); });
    const ProblemParams& params = trial < 3 ? kParams : kCubic;
    const auto rep = inner_scalar_solve(0.5, partner, Equation::First, src,
                                        NonlinearitySpec::prototype(2, 0.5), params, SolveConfig{});
    ASSERT_NE(rep.status, SolveStatus::NonfiniteValue);
    ASSERT_LE(rep.residual, 1e-8) << "trial " << trial;
    ASSERT_GE(rep.energy_history.size(), 2u);
    for (std::size_t i = 1; i < rep.energy_history.size(); ++i) {
      ASSERT_LE(rep.energy_history[i], rep.energy_history[i - 1] + 1e-14 * std::abs(rep.energy_history[i - 1]))
          << "trial " << trial << " step " << i;
    }
  }
}

TEST(Picard, ZeroDatumLeavesConstantSourceForV) {
  auto g = make_grid(1, 65);
  SolveConfig cfg;
  cfg.k = 5;
  const auto spec = NonlinearitySpec::prototype(2, 0.5);
  const auto res = picard_system_solve(Field(g), spec, kParams, cfg);
  ASSERT_TRUE(res.converged);
  EXPECT_EQ(res.u.max_abs(), 0.0);
  EXPECT_GT(res.v.max_value(), 0.0);
  const auto oracle = inner_scalar_solve(res.A_k, Field(g), Equation::Second,
                                         Field::constant(g, 1.0 / cfg.k), spec, kParams, cfg);
  ASSERT_TRUE(oracle.converged());
  for (std::size_t i = 0; i < res.v.size(); ++i) {
    EXPECT_NEAR(res.v[i], oracle.solution[i], 1e-7 * res.v.max_abs());
  }
}

TEST(Picard, AcceptanceSetup) {
  const auto res = acceptance_solve();
  ASSERT_TRUE(res.converged) << to_string(res.status);
  EXPECT_LE(res.residual1, 1e-8);
  EXPECT_LE(res.residual2, 1e-8);
  EXPECT_GE(res.min_u, -1e-10);
  EXPECT_GE(res.min_v, -1e-10);
  EXPECT_TRUE(res.u_nonnegative && res.v_nonnegative);
  for (const auto& h : res.history) EXPECT_GE(h.A, 1.0 / res.k);
  EXPECT_GE(res.A_k, 1.0 / res.k);
}

TEST(Picard, ResidualCertificateRecheckable) {
  const auto res = acceptance_solve();
  auto f = Field::constant(res.u.grid_ptr(), 1.0);
  const auto spec = NonlinearitySpec::prototype(2, 0.5);
  EXPECT_LE(weak_residual_dual_norm(res.u, res.v, f, spec, kParams, Equation::First, 10), 1e-8);
  EXPECT_LE(weak_residual_dual_norm(res.u, res.v, f, spec, kParams, Equation::Second, 10), 1e-8);
}

TEST(Picard, BitwiseDeterministic) {
  const auto a = acceptance_solve();
  const auto b = acceptance_solve();
  EXPECT_EQ(a.A_k, b.A_k);
  EXPECT_EQ(a.iterations, b.iterations);
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    ASSERT_EQ(a.u[i], b.u[i]);
    ASSERT_EQ(a.v[i], b.v[i]);
  }
}

TEST(Picard, NegativeLobeReportedNotEnforced) {
  auto g = make_grid(1, 65);
  SolveConfig cfg;
  const auto res = picard_system_solve(sample(DatumSpec::sine(2.0, 5.0), g),
                                       NonlinearitySpec::prototype(2, 0.5), kParams, cfg);
  ASSERT_TRUE(res.converged);
  EXPECT_LT(res.min_u, 0.0);
  EXPECT_FALSE(res.u_nonnegative);
}

TEST(Picard, TwoDimensionalCoupledSolve) {
  auto g = make_grid(2, 17);
  SolveConfig cfg;
  cfg.k = 20;
  const auto spec = NonlinearitySpec::weighted_oscillatory(2, 0.5);
  const auto f = Field::constant(g, 4.0);
  const auto res = picard_system_solve(f, spec, kParams, cfg);
  ASSERT_TRUE(res.converged) << to_string(res.status);
  EXPECT_LE(weak_residual_dual_norm(res.u, res.v, f, spec, kParams, Equation::First, 20), 1e-8);
  EXPECT_LE(weak_residual_dual_norm(res.u, res.v, f, spec, kParams, Equation::Second, 20), 1e-8);
}

TEST(Picard, DatumTruncatedAtK) {
  auto g = make_grid(1, 33);
  SolveConfig cfg;
  cfg.k = 2;
  const auto spec = NonlinearitySpec::prototype(2, 0.5);
  const auto big = picard_system_solve(Field::constant(g, 50.0), spec, kParams, cfg);
  const auto cut = picard_system_solve(Field::constant(g, 2.0), spec, kParams, cfg);
  ASSERT_TRUE(big.converged && cut.converged);
  EXPECT_EQ(big.A_k, cut.A_k);
}

TEST(Continuation, SingleStage) {
  auto g = make_grid(1, 33);
  const auto c = k_continuation(Field::constant(g, 1.0), NonlinearitySpec::prototype(2, 0.5), kParams,
                                {1.0}, SolveConfig{});
  EXPECT_EQ(c.stages.size(), 1u);
  EXPECT_TRUE(c.cauchy.empty());
}

TEST(Continuation, ZeroDatumHasZeroUDifferences) {
  auto g = make_grid(1, 33);
  const auto c = k_continuation(Field(g), NonlinearitySpec::prototype(2, 0.5), kParams,
                                {1.0, 4.0, 16.0}, SolveConfig{});
  ASSERT_TRUE(c.all_converged());
  for (const auto& r : c.cauchy) EXPECT_EQ(r.du, 0.0);
}

TEST(Continuation, RejectsNonIncreasingSchedule) {
  auto g = make_grid(1, 33);
  EXPECT_THROW(k_continuation(Field(g), NonlinearitySpec::prototype(2, 0.5), kParams, {4.0, 1.0},
                              SolveConfig{}),
               InvalidArgument);
}

TEST(LinfReport, Cases) {
  auto g = make_grid(1, 33);
  SolveResult zero{Field(g), Field(g)};
  const auto f = Field::constant(g, 1.0);
  const auto tracked = linf_report(zero, f, kParams, 2.0, 10);
  EXPECT_TRUE(tracked.applicable);
  EXPECT_EQ(tracked.max_u, 0.0);
  EXPECT_EQ(tracked.ratio_u, 0.0);
  const auto na = linf_report(zero, f, kParams, 1.5, 10);  // N/p = 1.5
  EXPECT_FALSE(na.applicable);
  EXPECT_EQ(na.verdict, "NotApplicable");
}
