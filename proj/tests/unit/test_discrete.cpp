#include "helpers.hpp"

#include "kmslab/discrete.hpp"
#include "kmslab/error.hpp"

#include <numbers>
#include <sstream>

using namespace kmslab;
using kmslab::testing::RelNear;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> nodal(const Grid& g, double (*fn)(const Point&)) {
  std::vector<double> v(g.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g.node_position(i));
  return v;
}

Field bump(const GridPtr& g) {
  return Field::sample(g, [](const Point& x) { return x[0] * (1 - x[0]); });
}

const ProblemParams kParams(3, 2, 2, 0.5, 1.3);

} // namespace

TEST(Grid, SpacingAndBoundary) {
  auto g = make_grid(2, 5);
  EXPECT_DOUBLE_EQ(g->h(0), 0.25);
  EXPECT_EQ(g->node_count(), 25u);
  EXPECT_EQ(g->interior_count(), 9u);
  EXPECT_TRUE(g->is_boundary(0));
  EXPECT_THROW(Grid(1, 2), InvalidArgument);
  EXPECT_THROW(Grid(4, 5), InvalidArgument);
}

TEST(Field, BoundaryMustBeZero) {
  auto g = make_grid(1, 5);
  EXPECT_THROW(Field(g, {1, 0, 0, 0, 0}), InvalidArgument);
  EXPECT_NO_THROW(Field(g, {0, 1, 2, 3, 0}));
}

TEST(FaceGradients, ZeroField) {
  const auto fg = gradient_at_faces(Field(make_grid(2, 6)));
  for (int a = 0; a < 2; ++a) {
    for (double x : fg.values[static_cast<std::size_t>(a)]) EXPECT_EQ(x, 0.0);
  }
}

TEST(FaceGradients, AffineExact) {
  auto g = make_grid(1, 9);
  const auto v = nodal(*g, [](const Point& x) { return x[0]; });
  const auto fg = gradient_at_faces(*g, v);
  ASSERT_EQ(fg.values[0].size(), 8u);
  for (double x : fg.values[0]) EXPECT_NEAR(x, 1.0, 1e-14);
}

TEST(FaceGradients, QuadraticMidpointSlope) {
  auto g = make_grid(1, 5);
  const auto v = nodal(*g, [](const Point& x) { return x[0] * x[0]; });
  const auto fg = gradient_at_faces(*g, v);
  EXPECT_DOUBLE_EQ(fg.values[0][1], 0.75);
  EXPECT_DOUBLE_EQ(fg.midpoints[0][1][0], 0.375);
}

TEST(LqNorm, Examples) {
  auto g = make_grid(1, 129);
  EXPECT_EQ(lq_norm(Field(g), 2.0), 0.0);
  const auto ones = std::vector<double>(g->node_count(), 1.0);
  for (double q : {1.0, 2.0, 3.5}) EXPECT_TRUE(RelNear(lq_norm(*g, ones, q), 1.0, 1e-14));
  const auto x = nodal(*g, [](const Point& p) { return p[0]; });
  const double h = g->h(0);
  EXPECT_NEAR(lq_norm(*g, x, 2.0), 1.0 / std::sqrt(3.0), h * h);
}

TEST(LqNorm, AbsolutelyHomogeneous) {
  SplitRng rng(3);
  for (int d = 1; d <= 3; ++d) {
    auto g = make_grid(d, d == 3 ? 6 : 17);
    const Field u = kmslab::testing::random_field(g, rng);
    for (double lam : {-2.0, 0.5, 4.0, -0.125}) {
      for (double q : {1.0, 2.0, 3.0}) {
        EXPECT_TRUE(RelNear(lq_norm(u * lam, q), std::abs(lam) * lq_norm(u, q), 1e-14));
      }
    }
  }
}

TEST(LqNorm, HolderConsistency) {
  SplitRng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    auto g = make_grid(d, d == 3 ? 5 : 11);
    const Field u = kmslab::testing::random_field(g, rng);
    const Field v = kmslab::testing::random_field(g, rng);
    const double q = rng.uniform(1.1, 6.0);
    const double qc = q / (q - 1);
    ASSERT_LE(std::abs(integrate_product(u, v)), lq_norm(u, q) * lq_norm(v, qc) * (1 + 1e-12));
  }
}

TEST(W1pSeminorm, Examples) {
  auto g = make_grid(1, 129);
  EXPECT_EQ(w1p_seminorm(Field(g), 2.0), 0.0);
  const double h = g->h(0);
  EXPECT_NEAR(w1p_seminorm(bump(g), 2.0), std::sqrt(1.0 / 3.0), h * h);
  const auto affine = nodal(*g, [](const Point& x) { return -2.5 * x[0]; });
  EXPECT_TRUE(RelNear(w1p_seminorm(*g, affine, 3.0), 2.5, 1e-13));
}

TEST(NonlocalCoefficient, Examples) {
  auto g = make_grid(1, 257);
  const double h = g->h(0);
  EXPECT_DOUBLE_EQ(nonlocal_coefficient(Field(g), Field(g), 2.0, 1.0), 1.0);
  EXPECT_NEAR(nonlocal_coefficient(bump(g), Field(g), 2.0, kNoRegularization), 1.0 / 3.0, h * h);
  EXPECT_NEAR(nonlocal_coefficient(bump(g), bump(g), 2.0, 2.0), 0.5 + 2.0 / 3.0, 2 * h * h);
}

TEST(Poincare, OneDimensionalConstantExact) {
  // sin(pi x) is the discrete extremal; the constant is (h/2) cot(pi h/2).
  double previous = 0.0;
  SplitRng rng(12);
  for (int n : {9, 17, 33, 65, 129}) {
    auto g = make_grid(1, n);
    const double h = g->h(0);
    const double c_grid = 0.5 * h / std::tan(kPi * h / 2.0);
    const Field s = Field::sample(g, [](const Point& x) { return std::sin(kPi * x[0]); });
    EXPECT_TRUE(RelNear(lq_norm(s, 2.0) / w1p_seminorm(s, 2.0), c_grid, 1e-12));
    for (int i = 0; i < 50; ++i) {
      const Field u = kmslab::testing::random_field(g, rng);
      ASSERT_LE(lq_norm(u, 2.0), c_grid * w1p_seminorm(u, 2.0) * (1 + 1e-12));
    }
    EXPECT_GT(c_grid, previous);
    EXPECT_LT(c_grid, 1.0 / kPi);
    previous = c_grid;
  }
}

TEST(Poincare, BoundedInHigherDimensions) {
  SplitRng rng(13);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int d = 2; d <= 3; ++d) {
      auto g = make_grid(d, d == 2 ? 17 : 7);
      for (int i = 0; i < 30; ++i) {
        const Field u = kmslab::testing::random_field(g, rng);
        ASSERT_LE(lq_norm(u, p), w1p_seminorm(u, p));
      }
    }
  }
}

TEST(Residual, ZeroInputs) {
  auto g = make_grid(2, 9);
  const Field z(g);
  const auto r = weighted_plap_residual(z, 1.0, 2.5, 0.0, z, z);
  EXPECT_EQ(r.max_abs(), 0.0);
}

TEST(Residual, ManufacturedQuadraticRate) {
  double prev = 0.0;
  for (int n : {33, 65, 129, 257}) {
    auto g = make_grid(1, n);
    const Field u = Field::sample(g, [](const Point& x) { return std::sin(kPi * x[0]); });
    const Field src = Field::sample(g, [](const Point& x) { return kPi * kPi * std::sin(kPi * x[0]); });
    const double err = weighted_plap_residual(u, 1.0, 2.0, 0.0, Field(g), src).max_abs();
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / err), 2.0, 0.05);
    prev = err;
  }
}

TEST(Residual, ManufacturedCubicFlux) {
  double prev = 1e300;
  for (int n : {33, 65, 129, 257}) {
    auto g = make_grid(1, n);
    const Field src = Field::sample(g, [](const Point& x) { return 4.0 * std::abs(1 - 2 * x[0]); });
    const double err = weighted_plap_residual(bump(g), 1.0, 3.0, 0.0, Field(g), src).max_abs();
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Residual, Linearity) {
  SplitRng rng(5);
  auto g = make_grid(2, 9);
  const Field u = kmslab::testing::random_field(g, rng);
  const Field u2 = kmslab::testing::random_field(g, rng);
  const Field a = kmslab::testing::random_field(g, rng);
  const Field b = kmslab::testing::random_field(g, rng);
  const Field z(g);
  const auto base = weighted_plap_residual(u, 1.3, 3.0, 1e-3, z, z);
  const auto full = weighted_plap_residual(u, 1.3, 3.0, 1e-3, a, b);
  const auto part = base + a - b;
  for (std::size_t i = 0; i < full.size(); ++i) EXPECT_NEAR(full[i], part[i], 1e-12 * (1 + std::abs(full[i])));
  const auto lin = weighted_plap_residual(u + u2 * 2.0, 0.7, 2.0, 0.0, z, z);
  const auto sum = weighted_plap_residual(u, 0.7, 2.0, 0.0, z, z) +
                   weighted_plap_residual(u2, 0.7, 2.0, 0.0, z, z) * 2.0;
  for (std::size_t i = 0; i < lin.size(); ++i) EXPECT_NEAR(lin[i], sum[i], 1e-10 * (1 + std::abs(lin[i])));
}

TEST(WeakDualNorm, ZeroProblem) {
  auto g = make_grid(1, 33);
  const auto spec = NonlinearitySpec::prototype(2, 0.5);
  EXPECT_EQ(weak_residual_dual_norm(Field(g), Field(g), Field(g), spec, kParams, Equation::First, 10), 0.0);
}

TEST(WeakDualNorm, ConstantDatumAgainstHats) {
  // In 1D the hat has integral h and gradient norm sqrt(2/h) for p = 2.
  auto g = make_grid(1, 33);
  const double h = g->h(0);
  EXPECT_TRUE(RelNear(hat_norm(*g, 2.0), std::sqrt(2.0 / h), 1e-14));
  const auto spec = NonlinearitySpec::prototype(2, 0.5);
  const double r = weak_residual_dual_norm(Field(g), Field(g), Field::constant(g, 1.0), spec,
                                           kParams, Equation::First, 10);
  EXPECT_TRUE(RelNear(r, h / std::sqrt(2.0 / h), 1e-12));
  EXPECT_GT(r, 0.0);
}

TEST(FieldCsv, HeaderAndRows) {
  auto g = make_grid(2, 3);
  std::ostringstream os;
  write_field_csv(Field(g, {0, 0, 0, 0, 0.1, 0, 0, 0, 0}), os);
  const auto s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "x,y,value");
  EXPECT_NE(s.find("0.5,0.5,0.10000000000000001"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 10);
}
