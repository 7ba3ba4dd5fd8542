#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "igr/elliptic.hpp"

using namespace igr;

namespace {

constexpr double pi = std::numbers::pi;

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

double max_abs(std::span<const double> a) {
  double d = 0.0;
  for (double v : a) d = std::max(d, std::abs(v));
  return d;
}

ScalarField random_positive(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.5, 2.5);
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

// Tridiagonal-plus-corners matrix of the 1D operator, built from the stencil.
Eigen::MatrixXd assemble_1d(const ScalarField& ups, double alpha) {
  const Grid& g = ups.grid();
  const int n = g.n;
  const double s = alpha / (g.h * g.h);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n, im = (i + n - 1) % n;
    const double up = 0.5 * (ups(i) + ups(ip)), um = 0.5 * (ups(i) + ups(im));
    A(i, i) += ups(i) + s * (up + um);
    A(i, ip) -= s * up;
    A(i, im) -= s * um;
  }
  return A;
}

}  // namespace

TEST(ApplyH, AlphaZeroIsPointwise) {
  std::mt19937_64 rng(10);
  for (int dim : {1, 2}) {
    const Grid g = Grid::make(dim, 8);
    const ScalarField ups = random_positive(g, rng);
    const TensorField f = random_field<2>(g, rng);
    const TensorField hf = apply_H(ups, 0.0, f);
    for (int comp = 0; comp < f.components(); ++comp) {
      for (std::size_t c = 0; c < g.cells(); ++c) EXPECT_EQ(hf(c, comp), ups(c) * f(c, comp));
    }
  }
}

TEST(ApplyH, SineIsEigenfunctionOfCompactStencil) {
  const int n = 40;
  const double alpha = 0.003;
  const Grid g = Grid::make(1, n);
  ScalarField ups(g, 1.0), f(g);
  for (int i = 0; i < n; ++i) f(i) = std::sin(2 * pi * g.center(i));
  const ScalarField hf = apply_H(ups, alpha, f);
  const double lambda = 1.0 + alpha * (2.0 - 2.0 * std::cos(2 * pi * g.h)) / (g.h * g.h);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(hf(i), lambda * f(i), 1e-12);
}

TEST(ApplyH, ConstantsOnlyFeelScreening) {
  std::mt19937_64 rng(11);
  for (int dim : {1, 2}) {
    const Grid g = Grid::make(dim, 8);
    const ScalarField ups = random_positive(g, rng);
    const TensorField f(g, 1.75);
    const TensorField hf = apply_H(ups, 0.1, f);
    for (int comp = 0; comp < f.components(); ++comp) {
      for (std::size_t c = 0; c < g.cells(); ++c) EXPECT_NEAR(hf(c, comp), ups(c) * 1.75, 1e-12);
    }
  }
}

TEST(ApplyH, ShapeMismatchThrows) {
  const ScalarField ups(Grid::make(1, 8), 1.0);
  EXPECT_THROW(apply_H(ups, 0.1, ScalarField(Grid::make(1, 9))), ShapeMismatch);
  EXPECT_THROW(apply_H(ups, 0.1, TensorField(Grid::make(1, 4))), ShapeMismatch);
}

TEST(ApplyH, SymmetricPositiveDefinite) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + trial % 2;
    const int n = trial % 4 < 2 ? 8 : 16;
    const Grid g = Grid::make(dim, n);
    const ScalarField ups = random_positive(g, rng);
    const double alpha = std::pow(10.0, -3.0 + (trial % 5) * 0.5);
    const TensorField f = random_field<2>(g, rng), k = random_field<2>(g, rng);
    const double a = inner(f, apply_H(ups, alpha, k));
    const double b = inner(apply_H(ups, alpha, f), k);
    EXPECT_NEAR(a, b, 1e-12 * (std::abs(a) + std::abs(b)));
    EXPECT_GT(inner(f, apply_H(ups, alpha, f)), 0.0);
  }
}

TEST(ApplyH, YConstantFieldsReduceTo1D) {
  std::mt19937_64 rng(13);
  const int n = 16;
  const double alpha = 0.01;
  const Grid g1 = Grid::make(1, n), g2 = Grid::make(2, n);
  const ScalarField ups1 = random_positive(g1, rng);
  const ScalarField f1 = random_field<0>(g1, rng);
  ScalarField ups2(g2);
  TensorField f2(g2);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      ups2(g2.index(i, j)) = ups1(i);
      f2.at(g2.index(i, j), 0, 0) = f1(i);
    }
  }
  const ScalarField h1 = apply_H(ups1, alpha, f1);
  const TensorField h2 = apply_H(ups2, alpha, f2);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t c = g2.index(i, j);
      EXPECT_NEAR(h2.at(c, 0, 0), h1(i), 1e-12);
      EXPECT_EQ(h2.at(c, 0, 1), 0.0);
      EXPECT_EQ(h2.at(c, 1, 0), 0.0);
      EXPECT_EQ(h2.at(c, 1, 1), 0.0);
    }
  }
}

TEST(SolveH1d, ConstantSolution) {
  std::mt19937_64 rng(14);
  const Grid g = Grid::make(1, 33);
  const ScalarField ups = random_positive(g, rng);
  ScalarField rhs(g);
  for (int i = 0; i < g.n; ++i) rhs(i) = 0.4 * ups(i);
  const ScalarField x = solve_H_1d(ups, 0.05, rhs);
  for (int i = 0; i < g.n; ++i) EXPECT_NEAR(x(i), 0.4, 1e-13);
}

TEST(SolveH1d, InvertsEigenvalue) {
  const int n = 50;
  const double alpha = 0.02;
  const Grid g = Grid::make(1, n);
  const double lambda = 1.0 + alpha * (2.0 - 2.0 * std::cos(2 * pi * g.h)) / (g.h * g.h);
  ScalarField ups(g, 1.0), rhs(g);
  for (int i = 0; i < n; ++i) rhs(i) = lambda * std::sin(2 * pi * g.center(i));
  const ScalarField x = solve_H_1d(ups, alpha, rhs);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(x(i), std::sin(2 * pi * g.center(i)), 1e-13);
}

TEST(SolveH1d, MatchesDenseLu) {
  std::mt19937_64 rng(15);
  const Grid g = Grid::make(1, 32);
  const ScalarField ups = random_positive(g, rng);
  const ScalarField rhs = random_field<0>(g, rng);
  const double alpha = 0.01;
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.values().data(), g.n);
  const Eigen::VectorXd expect = assemble_1d(ups, alpha).partialPivLu().solve(b);
  const ScalarField x = solve_H_1d(ups, alpha, rhs);
  const Eigen::VectorXd got = Eigen::Map<const Eigen::VectorXd>(x.values().data(), g.n);
  EXPECT_LE((got - expect).norm() / expect.norm(), 1e-11);
}

TEST(SolveH1d, RoundTrip) {
  std::mt19937_64 rng(16);
  const Grid g = Grid::make(1, 200);
  const ScalarField ups = random_positive(g, rng);
  const ScalarField f = random_field<0>(g, rng);
  const ScalarField back = solve_H_1d(ups, 20.0 * g.h * g.h, apply_H(ups, 20.0 * g.h * g.h, f));
  EXPECT_LE(max_abs_diff(back.values(), f.values()), 1e-10 * max_abs(f.values()));
}

TEST(SolveH1d, RejectsNonPositiveCoefficient) {
  const Grid g = Grid::make(1, 8);
  ScalarField ups(g, 1.0);
  ups(2) = -1.0;
  EXPECT_THROW(solve_H_1d(ups, 0.1, ScalarField(g, 1.0)), NonPositiveDensity);
}

TEST(SolveH2d, ConstantTensorSolution) {
  std::mt19937_64 rng(17);
  const Grid g = Grid::make(2, 12);
  const ScalarField ups = random_positive(g, rng);
  const double C[4] = {0.3, -1.2, 2.0, 0.7};
  TensorField rhs(g);
  for (int comp = 0; comp < 4; ++comp) {
    for (std::size_t c = 0; c < g.cells(); ++c) rhs(c, comp) = ups(c) * C[comp];
  }
  const TensorField x = solve_H_2d(ups, 0.01, rhs);
  for (int comp = 0; comp < 4; ++comp) {
    for (std::size_t c = 0; c < g.cells(); ++c) EXPECT_NEAR(x(c, comp), C[comp], 1e-9);
  }
}

TEST(SolveH2d, AlphaZeroDividesPointwise) {
  std::mt19937_64 rng(18);
  const Grid g = Grid::make(2, 10);
  const ScalarField ups = random_positive(g, rng);
  const TensorField rhs = random_field<2>(g, rng);
  EllipticOptions opts;
  opts.jacobi = false;
  SolveReport report;
  const TensorField x = solve_H_2d(ups, 0.0, rhs, opts, nullptr, &report);
  for (int comp = 0; comp < 4; ++comp) {
    for (std::size_t c = 0; c < g.cells(); ++c) EXPECT_NEAR(x(c, comp), rhs(c, comp) / ups(c), 1e-9);
  }
  // CG on a diagonal operator ends within a handful of iterations; with the
  // preconditioner it is exact after one.
  opts.jacobi = true;
  solve_H_2d(ups, 0.0, rhs, opts, nullptr, &report);
  EXPECT_LE(report.iterations, 4);
}

TEST(SolveH2d, MatchesDenseSolve) {
  std::mt19937_64 rng(19);
  const int n = 8;
  const Grid g = Grid::make(2, n);
  const ScalarField ups = random_positive(g, rng);
  const TensorField rhs = random_field<2>(g, rng);
  const double alpha = 0.01;
  const int m = 4 * n * n;
  // Columns of the operator from unit tensors; the dense system is then solved by LU.
  Eigen::MatrixXd A(m, m);
  TensorField e(g);
  for (int col = 0; col < m; ++col) {
    std::fill(e.values().begin(), e.values().end(), 0.0);
    e.values()[col] = 1.0;
    const TensorField he = apply_H(ups, alpha, e);
    for (int row = 0; row < m; ++row) A(row, col) = he.values()[row];
  }
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.values().data(), m);
  const Eigen::VectorXd expect = A.partialPivLu().solve(b);
  const TensorField x = solve_H_2d(ups, alpha, rhs);
  const Eigen::VectorXd got = Eigen::Map<const Eigen::VectorXd>(x.values().data(), m);
  EXPECT_LE((A * got - b).norm() / b.norm(), 1e-10);
  EXPECT_LE((got - expect).norm() / expect.norm(), 1e-9);
  EXPECT_LE((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveH2d, RoundTrip) {
  std::mt19937_64 rng(20);
  const Grid g = Grid::make(2, 24);
  const ScalarField ups = random_positive(g, rng);
  const TensorField f = random_field<2>(g, rng);
  const double alpha = 20.0 * g.h * g.h;
  EllipticOptions opts;
  const TensorField back = solve_H_2d(ups, alpha, apply_H(ups, alpha, f), opts);
  EXPECT_LE(std::sqrt(inner(back - f, back - f) / inner(f, f)), 10 * opts.tol * 100);
}

TEST(SolveH2d, WarmStartReachesSameSolution) {
  std::mt19937_64 rng(21);
  const Grid g = Grid::make(2, 16);
  const ScalarField ups = random_positive(g, rng);
  const TensorField rhs = random_field<2>(g, rng);
  const double alpha = 0.005;
  SolveReport cold, warm;
  const TensorField a = solve_H_2d(ups, alpha, rhs, {}, nullptr, &cold);
  const TensorField b = solve_H_2d(ups, alpha, rhs, {}, &a, &warm);
  EXPECT_LE(warm.iterations, 1);
  EXPECT_LE(max_abs_diff(a.values(), b.values()), 1e-8 * max_abs(a.values()));
}

TEST(SolveH2d, IterationCountBoundedUnderQuadraticAlpha) {
  std::mt19937_64 rng(22);
  std::vector<int> counts;
  for (int n : {32, 64, 128}) {
    const Grid g = Grid::make(2, n);
    ScalarField ups(g);
    TensorField rhs(g);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double x = g.center(i), y = g.center(j);
        ups(g.index(i, j)) = 1.0 + 0.5 * std::sin(2 * pi * x) * std::cos(2 * pi * y);
        for (int comp = 0; comp < 4; ++comp) rhs(g.index(i, j), comp) = std::cos(2 * pi * (x + comp * y));
      }
    }
    SolveReport report;
    solve_H_2d(ups, 20.0 * g.h * g.h, rhs, {}, nullptr, &report);
    counts.push_back(report.iterations);
  }
  const double mean = (counts[0] + counts[1] + counts[2]) / 3.0;
  for (int c : counts) EXPECT_LE(std::abs(c - mean), 0.3 * mean) << c;
}

TEST(SolveH2d, NoConvergenceReported) {
  std::mt19937_64 rng(23);
  const Grid g = Grid::make(2, 16);
  const ScalarField ups = random_positive(g, rng);
  EllipticOptions opts;
  opts.max_iter = 2;
  opts.tol = 1e-14;
  try {
    solve_H_2d(ups, 0.05, random_field<2>(g, rng), opts);
    FAIL() << "expected NoConvergence";
  } catch (const NoConvergence& e) {
    EXPECT_EQ(e.iterations(), 2);
    EXPECT_GT(e.residual(), 1e-14);
  }
}

TEST(SolveH2d, ZeroRhsGivesZero) {
  const Grid g = Grid::make(2, 8);
  const TensorField x = solve_H_2d(ScalarField(g, 1.0), 0.1, TensorField(g));
  for (double v : x.values()) EXPECT_EQ(v, 0.0);
}

TEST(Manufactured, SecondOrderIn1D) {
  std::vector<double> errs;
  const double alpha = 0.01;
  for (int n : {32, 64, 128, 256}) {
    const Grid g = Grid::make(1, n);
    ScalarField ups(g), rhs(g);
    for (int i = 0; i < n; ++i) {
      const double s = std::sin(2 * pi * g.center(i)), c = std::cos(2 * pi * g.center(i));
      ups(i) = 2.0 + s;
      rhs(i) = (2.0 + s) * c + 4 * pi * pi * alpha * c * (2.0 + 2.0 * s);
    }
    const ScalarField x = solve_H_1d(ups, alpha, rhs);
    double e = 0.0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(x(i) - std::cos(2 * pi * g.center(i))));
    errs.push_back(e);
  }
  for (std::size_t k = 1; k < errs.size(); ++k) EXPECT_NEAR(std::log2(errs[k - 1] / errs[k]), 2.0, 0.2);
}
