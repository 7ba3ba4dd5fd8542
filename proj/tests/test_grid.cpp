#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "igr/grid.hpp"

using namespace igr;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField random_scalar(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.values()) v = d(rng);
  return f;
}

template <int Rank>
Field<Rank> random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Field<Rank> f(g);
  for (double& v : f.values()) v = d(rng);
  return f;
}

}  // namespace

TEST(Grid, GeometryAndIndexing) {
  const Grid g = Grid::make(2, 4, 2.0);
  EXPECT_EQ(g.cells(), 16u);
  EXPECT_DOUBLE_EQ(g.h, 0.5);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25);
  EXPECT_DOUBLE_EQ(g.center(0), 0.25);
  EXPECT_EQ(g.index(1, 2), 9u);
  EXPECT_EQ(g.index(-1, 0), 3u);
  EXPECT_EQ(g.index(0, 4), 0u);
  EXPECT_EQ(g.neighbor(g.index(3, 1), 0, 1), g.index(0, 1));
  EXPECT_EQ(g.neighbor(g.index(3, 0), 1, -1), g.index(3, 3));
  EXPECT_THROW(Grid::make(3, 4), std::invalid_argument);
  EXPECT_THROW(Grid::make(1, 0), std::invalid_argument);
}

TEST(Grid, TensorComponentLayout) {
  const Grid g = Grid::make(2, 3);
  TensorField t(g);
  t.at(4, 1, 0) = 7.0;
  EXPECT_EQ(t(4, 2), 7.0);
  EXPECT_EQ(t.component(2)[4], 7.0);
  EXPECT_EQ(t.size(), 36u);
}

TEST(CentralGradient, ConstantIsExactlyZero) {
  for (int dim : {1, 2}) {
    const Grid g = Grid::make(dim, 16);
    const VectorField grad = central_gradient(ScalarField(g, 3.7));
    for (double v : grad.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(CentralGradient, SineMatchesDiscreteSymbol) {
  const int n = 64;
  const Grid g = Grid::make(1, n);
  ScalarField f(g);
  for (int i = 0; i < n; ++i) f(i) = std::sin(2 * pi * g.center(i));
  const VectorField grad = central_gradient(f);
  const double symbol = std::sin(2 * pi * g.h) / (2 * pi * g.h);
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(grad(i), 2 * pi * std::cos(2 * pi * g.center(i)) * symbol, 1e-12);
  }
}

TEST(CentralGradient, SawtoothMatchesLoopOracle) {
  const int n = 10;
  const Grid g = Grid::make(1, n);
  ScalarField f(g);
  for (int i = 0; i < n; ++i) f(i) = std::fmod(g.center(i), 1.0);
  const VectorField grad = central_gradient(f);
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n, im = (i + n - 1) % n;
    EXPECT_DOUBLE_EQ(grad(i), (f(ip) - f(im)) / (2 * g.h));
  }
  EXPECT_NEAR(grad(4), 1.0, 1e-12);
  EXPECT_NEAR(grad(0), 1.0 - n / 2.0, 1e-12);
}

TEST(CentralGradient, VectorJacobianConvention) {
  const int n = 32;
  const Grid g = Grid::make(2, n);
  VectorField u(g);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) u(g.index(i, j), 0) = std::sin(2 * pi * g.center(j));
  }
  const TensorField du = central_gradient(u);
  const double symbol = std::sin(2 * pi * g.h) / (2 * pi * g.h);
  for (int j = 0; j < n; ++j) {
    const std::size_t c = g.index(5, j);
    EXPECT_EQ(du.at(c, 0, 0), 0.0);
    EXPECT_NEAR(du.at(c, 0, 1), 2 * pi * std::cos(2 * pi * g.center(j)) * symbol, 1e-12);
    EXPECT_EQ(du.at(c, 1, 0), 0.0);
    EXPECT_EQ(du.at(c, 1, 1), 0.0);
  }
}

TEST(Divergence, ConstantGivesZero) {
  const Grid g = Grid::make(2, 8);
  EXPECT_EQ(total_variation(divergence(VectorField(g, 2.0)).values(), g), 0.0);
  const VectorField div = divergence(TensorField(g, -1.0));
  for (double v : div.values()) EXPECT_EQ(v, 0.0);
}

TEST(Divergence, OfGradientIsWideLaplacian) {
  std::mt19937_64 rng(1);
  const int n = 12;
  const Grid g = Grid::make(2, n);
  const ScalarField f = random_scalar(g, rng);
  const ScalarField lap = divergence(central_gradient(f));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double wide = (f(g.index(i + 2, j)) + f(g.index(i - 2, j)) + f(g.index(i, j + 2)) +
                           f(g.index(i, j - 2)) - 4 * f(g.index(i, j))) /
                          (4 * g.h * g.h);
      EXPECT_NEAR(lap(g.index(i, j)), wide, 1e-10);
    }
  }
}

TEST(Divergence, TensorMatchesAssembledMatrix) {
  std::mt19937_64 rng(2);
  const int n = 16;
  const Grid g = Grid::make(2, n);
  const TensorField F = random_field<2>(g, rng);
  const VectorField div = divergence(F);
  const std::size_t N = g.cells();
  // Row-by-row assembly: entry (r, cell) collects +-1/(2h) from the four neighbours.
  for (int r = 0; r < 2; ++r) {
    for (std::size_t q = 0; q < N; ++q) {
      std::vector<double> row(4 * N, 0.0);
      for (int c = 0; c < 2; ++c) {
        const std::size_t comp = (2 * r + c) * N;
        row[comp + g.neighbor(q, c, 1)] += 1.0 / (2 * g.h);
        row[comp + g.neighbor(q, c, -1)] -= 1.0 / (2 * g.h);
      }
      double expect = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) expect += row[k] * F.values()[k];
      EXPECT_NEAR(div(q, r), expect, 1e-11);
    }
  }
}

TEST(Operators, SummationByParts) {
  std::mt19937_64 rng(3);
  for (int dim : {1, 2}) {
    for (int n : {8, 16, 32}) {
      const Grid g = Grid::make(dim, n);
      const ScalarField f = random_scalar(g, rng);
      const VectorField v = random_field<1>(g, rng);
      const double lhs = inner(f, divergence(v));
      const double rhs = -inner(central_gradient(f), v);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)) * n);
    }
  }
}

TEST(Operators, Linearity) {
  std::mt19937_64 rng(4);
  const Grid g = Grid::make(2, 8);
  const VectorField a = random_field<1>(g, rng), b = random_field<1>(g, rng);
  const TensorField lhs = central_gradient(VectorField(2.0 * a + (-3.0) * b));
  const TensorField rhs = 2.0 * central_gradient(a) + (-3.0) * central_gradient(b);
  for (std::size_t k = 0; k < lhs.size(); ++k) EXPECT_NEAR(lhs.values()[k], rhs.values()[k], 1e-12);
}

TEST(Velocity, Division) {
  const Grid g = Grid::make(1, 5);
  State s(g);
  for (std::size_t c = 0; c < g.cells(); ++c) s.rho(c) = 2.0, s.mom(c, 0) = 3.0;
  const VectorField u0 = velocity(s);
  for (double v : u0.values()) EXPECT_EQ(v, 1.5);
  for (std::size_t c = 0; c < g.cells(); ++c) s.rho(c) = 1.0, s.mom(c, 0) = 0.1 * c;
  const VectorField u = velocity(s);
  for (std::size_t c = 0; c < g.cells(); ++c) EXPECT_EQ(u(c), s.mom(c, 0));
}

TEST(Velocity, ZeroDensityThrows) {
  const Grid g = Grid::make(1, 5);
  State s(g);
  for (std::size_t c = 0; c < g.cells(); ++c) s.rho(c) = 1.0;
  s.rho(3) = 0.0;
  try {
    velocity(s);
    FAIL() << "expected NonPositiveDensity";
  } catch (const NonPositiveDensity& e) {
    EXPECT_EQ(e.cell(), 3u);
  }
}

TEST(CheckState, FlagsNonFinite) {
  const Grid g = Grid::make(1, 4);
  State s(g);
  for (std::size_t c = 0; c < g.cells(); ++c) s.rho(c) = 1.0;
  s.mom(2, 0) = NAN;
  EXPECT_THROW(check_state(s), NonFiniteValue);
}

TEST(TotalVariation, PeriodicSum) {
  const Grid g = Grid::make(1, 4);
  const std::vector<double> q = {0.0, 1.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(total_variation(q, g), 4.0);
}
