#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "igr/geodesic.hpp"

using namespace igr;

TEST(GradPsi, Examples) {
  const DualPoint id = grad_psi({0.3, 2.5, 0.0});
  EXPECT_EQ(id.eta_bar, 0.3);
  EXPECT_EQ(id.eta_prime, 2.5);
  EXPECT_NEAR(grad_psi({0.0, std::sqrt(0.04), 0.04}).eta_prime, 0.0, 1e-16);
  const DualPoint e = grad_psi({1.0, 2.0, 1.0});
  EXPECT_DOUBLE_EQ(e.eta_bar, 1.0);
  EXPECT_DOUBLE_EQ(e.eta_prime, 1.5);
  EXPECT_THROW(grad_psi({0.0, 0.0, 0.1}), InfeasiblePoint);
  EXPECT_THROW(grad_psi({0.0, -1.0, 0.1}), InfeasiblePoint);
}

TEST(GradPsiInverse, RoundTrip) {
  for (double alpha : {0.0, 1e-3, 0.1, 1.0}) {
    for (double phi : {1e-3, 0.2, 1.0, 7.5}) {
      const PhasePoint p{-0.4, phi, alpha};
      const PhasePoint q = grad_psi_inverse(grad_psi(p), alpha);
      EXPECT_EQ(q.phi_bar, p.phi_bar);
      EXPECT_NEAR(q.phi_prime, phi, 1e-14 * std::max(1.0, phi));
    }
  }
  EXPECT_DOUBLE_EQ(grad_psi_inverse({0.0, 0.0}, 1.0).phi_prime, 1.0);
}

TEST(GradPsiInverse, ApproachesBoundaryMonotonically) {
  double prev = INFINITY;
  for (double eta : {-10.0, -100.0, -1000.0}) {
    const double phi = grad_psi_inverse({0.0, eta}, 1.0).phi_prime;
    EXPECT_GT(phi, 0.0);
    EXPECT_LT(phi, prev);
    // phi = 1/|eta| - 1/|eta|^3 + ...
    EXPECT_NEAR(phi * std::abs(eta), 1.0, 1.5 / (eta * eta));
    prev = phi;
  }
}

TEST(DualGeodesic, EuclideanWithoutBarrier) {
  const PhasePoint p0{0.5, 1.0, 0.0};
  const PhaseVelocity v{0.25, -0.5};
  for (double t : {0.0, 0.3, 1.0, 1.9}) {
    const PhasePoint p = dual_geodesic(p0, v, t);
    EXPECT_DOUBLE_EQ(p.phi_bar, 0.5 + 0.25 * t);
    EXPECT_DOUBLE_EQ(p.phi_prime, 1.0 - 0.5 * t);
  }
}

TEST(DualGeodesic, ConstantSeparationWithoutApproach) {
  const PhasePoint p0{0.0, 0.3, 0.05};
  for (double t : {0.5, 4.0, 100.0}) EXPECT_NEAR(dual_geodesic(p0, {1.0, 0.0}, t).phi_prime, 0.3, 1e-15);
}

TEST(DualGeodesic, InitialVelocityIsPreserved) {
  const PhasePoint p0{0.0, 0.7, 0.02};
  const PhaseVelocity v{0.3, -1.2};
  const double e = 1e-6;
  const PhasePoint a = dual_geodesic(p0, v, e), b = dual_geodesic(p0, v, -e);
  EXPECT_NEAR((a.phi_bar - b.phi_bar) / (2 * e), v.bar, 1e-8);
  EXPECT_NEAR((a.phi_prime - b.phi_prime) / (2 * e), v.prime, 1e-7);
}

TEST(DualGeodesic, MatchesRk4OfConnectionOde) {
  // Separation obeys phi'' = 2 alpha phi'^2 / (phi^3 (1 + alpha / phi^2)).
  const double alpha = 0.01;
  const PhasePoint p0{0.0, 1.0, alpha};
  auto accel = [alpha](double phi, double vel) {
    return 2 * alpha * vel * vel / (phi * phi * phi * (1 + alpha / (phi * phi)));
  };
  double phi = 1.0, vel = -1.0, t = 0.0, prev = phi;
  const double dt = 1e-4;
  for (int k = 1; k <= 100000; ++k) {
    const double k1x = vel, k1v = accel(phi, vel);
    const double k2x = vel + 0.5 * dt * k1v, k2v = accel(phi + 0.5 * dt * k1x, k2x);
    const double k3x = vel + 0.5 * dt * k2v, k3v = accel(phi + 0.5 * dt * k2x, k3x);
    const double k4x = vel + dt * k3v, k4v = accel(phi + dt * k3x, k4x);
    phi += dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    vel += dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    t = k * dt;
    if (k % 1000 == 0) {
      const double exact = dual_geodesic(p0, {0.0, -1.0}, t).phi_prime;
      EXPECT_GT(exact, 0.0);
      EXPECT_LT(exact, prev);
      EXPECT_NEAR(phi, exact, 1e-8 * exact) << t;
      prev = exact;
    }
  }
}

TEST(Trajectories, ColumnsCoincideWithoutBarrier) {
  TrajectoryConfig cfg;
  cfg.start.alpha = 0.0;
  for (const auto& r : sample_trajectories(cfg)) {
    if (r.t >= 1.0) break;
    EXPECT_DOUBLE_EQ(r.euclid.phi_prime, r.dual.phi_prime);
    EXPECT_DOUBLE_EQ(r.euclid.phi_bar, r.dual.phi_bar);
  }
}

TEST(Trajectories, DualStaysFeasibleAndEuclidMerges) {
  const auto rows = sample_trajectories({});
  ASSERT_EQ(rows.size(), 301u);
  EXPECT_EQ(rows.back().t, 3.0);
  for (const auto& r : rows) {
    EXPECT_GT(r.dual.phi_prime, 0.0);
    EXPECT_GE(r.euclid.phi_prime, 0.0);
    if (r.t >= 1.0) {
      EXPECT_EQ(r.euclid.phi_prime, 0.0);
    }
  }
  EXPECT_EQ(merge_time({0.0, 1.0, 0.01}, {0.0, -1.0}), 1.0);
  EXPECT_EQ(merge_time({0.0, 1.0, 0.01}, {0.0, 1.0}), INFINITY);
}

TEST(Trajectories, GapShrinksWithAlpha) {
  double prev = INFINITY;
  for (double alpha : {0.1, 0.01, 0.001}) {
    TrajectoryConfig cfg;
    cfg.start.alpha = alpha;
    double gap = 0.0;
    for (const auto& r : sample_trajectories(cfg)) {
      if (r.t >= 1.0) break;
      gap = std::max(gap, std::abs(r.dual.phi_prime - r.euclid.phi_prime));
    }
    EXPECT_LT(gap, prev) << alpha;
    prev = gap;
  }
}

TEST(Trajectories, CsvLayout) {
  TrajectoryConfig cfg;
  cfg.samples = 3;
  cfg.t_end = 2.0;
  std::ostringstream os;
  emit_trajectories(os, sample_trajectories(cfg));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,phi_bar_euclid,phi_prime_euclid,phi_bar_dual,phi_prime_dual");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3);
  EXPECT_THROW(sample_trajectories({.samples = 1}), std::invalid_argument);
}
