#include "helpers.hpp"

#include "kmslab/error.hpp"
#include "kmslab/experiments.hpp"

#include <atomic>
#include <stdexcept>

using namespace kmslab;
using kmslab::testing::RelNear;

namespace {

const ProblemParams kParams(3, 2, 2, 0.5, 1.3);

Field bump(const GridPtr& g) {
  return Field::sample(g, [](const Point& x) { return x[0] * (1 - x[0]); });
}

SolveResult fixed_point_solve(const GridPtr& g) {
  SolveConfig cfg;
  cfg.k = 10;
  cfg.relax = 0.5;
  return picard_system_solve(Field::constant(g, 1.0), NonlinearitySpec::prototype(2, 0.5), kParams, cfg);
}

} // namespace

TEST(MixedEnergy, ConstantOnes) {
  auto g = make_grid(2, 9);
  const std::vector<double> ones(g->node_count(), 1.0);
  EXPECT_TRUE(RelNear(mixed_energy(*g, ones, ones, 2.0, 0.5).value, 1.0, 1e-14));
  // Nodal weights live on interior nodes only.
  EXPECT_TRUE(RelNear(mixed_energy(*g, ones, ones, 3.0, 1.0, Quadrature::Nodal).value, 49.0 / 64.0, 1e-14));
}

TEST(MixedEnergy, BetaIntegral) {
  // (x(1-x))^3 integrates to 1/140.
  auto g = make_grid(1, 257);
  const double h = g->h(0);
  const Field b = bump(g);
  EXPECT_NEAR(mixed_energy(b, b, 2.0, 0.0).value, 1.0 / 140.0, h * h);
  EXPECT_NEAR(mixed_energy(b, b, 2.0, 0.0, Quadrature::Nodal).value, 1.0 / 140.0, h * h);
}

TEST(MixedEnergy, ClipsNegativeParts) {
  auto g = make_grid(1, 9);
  const Field neg = bump(g) * -1.0;
  const auto e = mixed_energy(neg, bump(g), 2.0, 0.5);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.clipped, 7u);
}

TEST(TailTable, MonotoneAndVanishing) {
  auto g = make_grid(1, 129);
  const auto res = fixed_point_solve(g);
  ASSERT_TRUE(res.converged);
  const auto spec = NonlinearitySpec::prototype(2, 0.5);
  const double top = res.u.max_abs();
  const std::vector<double> levels{0.0, 0.25 * top, 0.5 * top, 0.75 * top, 2.0 * top};
  const auto f = Field::constant(g, 1.0);
  for (auto which : {TailProduct::GU, TailProduct::HV, TailProduct::G, TailProduct::H}) {
    const auto t = tail_uniform_integrability(spec, res.u, res.v, levels, which, &f);
    ASSERT_EQ(t.rows.size(), levels.size());
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      EXPECT_LE(t.rows[i].value, t.rows[i - 1].value) << to_string(which);
    }
    EXPECT_EQ(t.rows.back().value, 0.0);
  }
}

TEST(ProofChain, HoldsOnFixedPoint) {
  auto g = make_grid(1, 129);
  const auto res = fixed_point_solve(g);
  ASSERT_TRUE(res.converged);
  const auto rep = proof_chain_check(NonlinearitySpec::prototype(2, 0.5), res.u, res.v,
                                     Field::constant(g, 1.0), kParams.c1(), {0.0, 0.05, 0.1, 0.2});
  EXPECT_TRUE(rep.all_ok());
  EXPECT_TRUE(rep.mixed_ok);
  EXPECT_GT(rep.mixed_rhs, 0.0);
  for (const auto& r : rep.rows) EXPECT_LE(r.lhs, r.rhs + rep.tolerance);
}

TEST(Regularity, ZeroFieldInconclusive) {
  auto g = make_grid(1, 65);
  const auto rep = regularity_probe(Field(g), {1.5, 2.0, 4.0});
  EXPECT_EQ(rep.verdict, "Inconclusive");
  for (const auto& [q, norm] : rep.norms) EXPECT_EQ(norm, 0.0);
}

TEST(Regularity, PowerSingularityTail) {
  // |x - 1/2|^-a has distribution function ~ lambda^(-1/a); nodes avoid the centre.
  const double a = 0.5;
  auto g = make_grid(1, 4096);
  const Field u = Field::sample(g, [&](const Point& x) {
    return 4.0 * x[0] * (1 - x[0]) * std::pow(std::abs(x[0] - 0.5), -a);
  });
  const auto rep = regularity_probe(u, {1.2, 1.5, 1.9});
  ASSERT_EQ(rep.verdict, "Fitted");
  EXPECT_NEAR(rep.tail_exponent, 1.0 / a, 0.15 / a);
}

TEST(Regularity, RejectsQAboveCap) {
  auto g = make_grid(1, 33);
  EXPECT_THROW(regularity_probe(bump(g), {2.0, 9.0}, 8.0), InvalidArgument);
}

TEST(AprioriSweep, TooFewLambdas) {
  auto g = make_grid(1, 33);
  SolveConfig cfg;
  cfg.k = 20;
  EXPECT_THROW(apriori_scaling_sweep(Field::constant(g, 1.0), {1, 2, 4}, NonlinearitySpec::prototype(2, 0.5),
                                     kParams, cfg),
               InsufficientSweep);
}

TEST(LinfProbe, NotApplicableAtCriticalT) {
  auto g = make_grid(1, 33);
  const auto rep = linf_scaling_probe(Field::constant(g, 1.0), {1, 2, 4, 8}, 1.5, 2.0, 3.0, SolveConfig{});
  EXPECT_FALSE(rep.applicable);
  EXPECT_EQ(rep.overall, Verdict::NotApplicable);
  EXPECT_TRUE(rep.points.empty());
}

TEST(LinfProbe, LinearCaseSlopeOne) {
  auto g = make_grid(1, 65);
  const auto rep = linf_scaling_probe(Field::constant(g, 1.0), {1, 2, 4, 8, 16}, 4.0, 2.0, 3.0, SolveConfig{});
  ASSERT_TRUE(rep.applicable);
  ASSERT_FALSE(rep.slopes.empty());
  EXPECT_NEAR(rep.slopes[0].fit.slope, 1.0, 1e-8);
  EXPECT_EQ(rep.overall, Verdict::Pass);
}

TEST(SlopeVerdict, Cases) {
  LineFit good{1.0, 0.0, 0.0, 5};
  EXPECT_EQ(slope_verdict(good, 1.0, 0.1), Verdict::Pass);
  LineFit noisy{1.0, 0.0, 0.2, 5};
  EXPECT_EQ(slope_verdict(noisy, 1.0, 0.1), Verdict::WeakPass);
  LineFit steep{1.5, 0.0, 0.0, 5};
  EXPECT_EQ(slope_verdict(steep, 1.0, 0.1), Verdict::Fail);
  EXPECT_EQ(slope_verdict(LineFit{1.1, 0.0, 0.0, 5}, 1.0, 0.1), Verdict::Pass);
}

TEST(Nontriviality, ZeroDatumFails) {
  SolveConfig cfg;
  cfg.k = 10;
  const auto rep = nontriviality_check(DatumSpec::zero(), NonlinearitySpec::prototype(2, 0.5), kParams, 1,
                                       {17, 33, 65}, cfg);
  EXPECT_EQ(rep.verdict_u, Verdict::Fail);
  EXPECT_EQ(rep.overall, Verdict::Fail);
}

TEST(Nontriviality, ConstantDatumPasses) {
  SolveConfig cfg;
  cfg.k = 10;
  const auto rep = nontriviality_check(DatumSpec::constant(1.0), NonlinearitySpec::prototype(2, 0.5), kParams,
                                       1, {17, 33, 65}, cfg);
  ASSERT_EQ(rep.rows.size(), 3u);
  for (const auto& r : rep.rows) EXPECT_TRUE(r.converged);
  EXPECT_EQ(rep.verdict_u, Verdict::Pass);
  EXPECT_GT(rep.rows.back().l1_u, rep.floor_u);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsLowestIndex) {
  try {
    parallel_for(64, [](std::size_t i) {
      if (i == 41) throw std::runtime_error("late");
      if (i == 7) throw std::runtime_error("early");
    });
    FAIL() << "no exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "early");
  }
}
