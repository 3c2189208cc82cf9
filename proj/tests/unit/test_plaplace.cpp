#include "helpers.hpp"

#include "kmslab/error.hpp"
#include "kmslab/plaplace.hpp"

using namespace kmslab;
using kmslab::testing::RelNear;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vec random_vec(SplitRng& rng, int d, double scale) {
  Vec v(d);
  for (int a = 0; a < d; ++a) v[a] = scale * rng.normal();
  return v;
}

} // namespace

TEST(Flux, Examples) {
  const Vec xi = vec({0.3, -1.7, 2.2});
  EXPECT_EQ(flux(xi, 2.0), xi);
  const Vec f = flux(vec({2.0, 0.0}), 3.0);
  EXPECT_DOUBLE_EQ(f[0], 4.0);
  EXPECT_EQ(f[1], 0.0);
  for (double p : {1.2, 1.5, 2.0, 3.0}) EXPECT_EQ(flux(vec({0.0, 0.0}), p).norm(), 0.0);
  EXPECT_THROW(flux(xi, 1.0), InvalidArgument);
}

TEST(RegularizedFlux, Examples) {
  const Vec xi = vec({0.4, -0.9});
  EXPECT_EQ(regularized_flux(xi, 1.7, 0.0), flux(xi, 1.7));
  EXPECT_EQ(regularized_flux(xi, 2.0, 0.3), xi);
  EXPECT_EQ(regularized_flux(vec({0.0, 0.0}), 1.5, 0.1).norm(), 0.0);
}

TEST(FluxProperties, OddAndHomogeneous) {
  SplitRng rng(101);
  for (int i = 0; i < 20000; ++i) {
    const int d = 1 + static_cast<int>(rng.uniform(0, 3));
    const double p = rng.uniform(1.1, 5.0);
    const Vec xi = random_vec(rng, d, std::pow(10.0, rng.uniform(-2, 2)));
    const double lam = std::pow(10.0, rng.uniform(-2, 2));
    const Vec f = flux(xi, p);
    ASSERT_TRUE(flux(Vec(-xi), p).isApprox(-f, 1e-14));
    const Vec scaled = flux(Vec(lam * xi), p);
    const Vec expected = std::pow(lam, p - 1.0) * f;
    ASSERT_LE((scaled - expected).norm(), 1e-10 * expected.norm());
  }
}

TEST(FluxProperties, RegularizationConverges) {
  for (double p : {1.2, 1.5, 3.0, 4.0}) {
    for (double mag : {0.1, 1.0, 10.0}) {
      const Vec xi = vec({0.6 * mag, 0.8 * mag});
      for (double eps : {1e-2, 1e-3, 1e-4}) {
        const double rel = (regularized_flux(xi, p, eps) - flux(xi, p)).norm() / flux(xi, p).norm();
        const double bound = eps * eps * std::abs(p - 2.0) / (2.0 * mag * mag);
        ASSERT_LE(rel, bound * 1.01 + 1e-15) << "p=" << p << " |xi|=" << mag << " eps=" << eps;
      }
    }
  }
}

TEST(MonotonicityConstants, Examples) {
  auto c2 = monotonicity_constants(2.0);
  EXPECT_DOUBLE_EQ(c2.C, 1.0);
  EXPECT_DOUBLE_EQ(c2.alpha, 1.0);
  EXPECT_EQ(c2.beta, 0.0);
  auto c3 = monotonicity_constants(3.0);
  EXPECT_DOUBLE_EQ(c3.C, 2.0);
  EXPECT_DOUBLE_EQ(c3.alpha, 1.0);
  EXPECT_EQ(c3.beta, 0.0);
  auto c15 = monotonicity_constants(1.5);
  EXPECT_DOUBLE_EQ(c15.alpha, 0.75);
  EXPECT_DOUBLE_EQ(c15.beta, 4.0);
  EXPECT_TRUE(RelNear(c15.C, std::pow(std::pow(2.0, 0.25) / 0.5, 0.75), 1e-14));
}

TEST(MonotonicityGap, Examples) {
  EXPECT_NEAR(pointwise_monotonicity_gap(vec({1, 0}), vec({0, 1}), 2.0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(pointwise_monotonicity_gap(vec({1, 0}), vec({0, 0}), 3.0), 0.5);
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0}) {
    EXPECT_EQ(pointwise_monotonicity_gap(vec({0.3, -2.0}), vec({0.3, -2.0}), p), 0.0);
  }
}

TEST(MonotonicityGap, RandomPairsNonnegative) {
  SplitRng rng(7);
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0}) {
    for (int d = 1; d <= 3; ++d) {
      for (int i = 0; i < 20000; ++i) {
        const Vec A = random_vec(rng, d, std::pow(10.0, rng.uniform(-3, 3)));
        const Vec B = random_vec(rng, d, std::pow(10.0, rng.uniform(-3, 3)));
        const double scale = std::pow(1.0 + A.norm() + B.norm(), p);
        ASSERT_GE(pointwise_monotonicity_gap(A, B, p), -1e-10 * scale);
      }
    }
  }
}

TEST(MonotonicityGap, QuadraticIsEquality) {
  SplitRng rng(8);
  for (int i = 0; i < 20000; ++i) {
    const Vec A = random_vec(rng, 3, 1.0);
    const Vec B = random_vec(rng, 3, 1.0);
    const double rhs = (A - B).squaredNorm();
    ASSERT_LE(std::abs(pointwise_monotonicity_gap(A, B, 2.0)), 1e-12 * rhs);
  }
}

TEST(NormMonotonicity, IdenticalFields) {
  SplitRng rng(21);
  auto grid = make_grid(2, 9);
  const Field u = kmslab::testing::random_field(grid, rng);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto r = norm_monotonicity_check(u, u, p);
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_GE(r.rhs, 0.0);
  }
}

TEST(NormMonotonicity, RandomFieldsHold) {
  SplitRng rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 1 + trial % 3;
    auto grid = make_grid(d, d == 1 ? 65 : (d == 2 ? 9 : 5));
    const Field u1 = kmslab::testing::random_field(grid, rng, 3.0);
    const Field u2 = kmslab::testing::random_field(grid, rng, 0.5);
    for (double p : {1.2, 1.5, 3.0, 4.0}) {
      const auto r = norm_monotonicity_check(u1, u2, p);
      ASSERT_LE(r.lhs, r.rhs * (1 + 1e-10)) << "p=" << p << " d=" << d;
    }
    const auto q = norm_monotonicity_check(u1, u2, 2.0);
    ASSERT_TRUE(RelNear(q.lhs, q.rhs, 1e-12));
    ASSERT_TRUE(RelNear(q.lhs, q.pairing, 1e-12));
  }
}

TEST(NormMonotonicity, SmoothFieldsSingularRange) {
  auto grid = make_grid(1, 65);
  const Field u1 = Field::sample(grid, [](const Point& x) { return std::sin(M_PI * x[0]); });
  const Field u2 = Field::sample(grid, [](const Point& x) { return x[0] * (1 - x[0]); });
  const auto r = norm_monotonicity_check(u1, u2, 1.5);
  EXPECT_GT(r.lhs, 0.0);
  EXPECT_LE(r.lhs, r.rhs);
}
