#pragma once

// Two-characteristic picture: the pair (x1, x2) is described by its mean
// position phi_bar and separation phi_prime > 0. Euclidean geodesics are
// straight lines that leave the feasible half-space when characteristics
// cross; dual geodesics of the barrier psi = |.|^2/2 - alpha log(phi_prime)
// are straight lines in grad(psi) coordinates and never leave it.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "igr/errors.hpp"

namespace igr {

struct PhasePoint {
  double phi_bar = 0.0;
  double phi_prime = 1.0;
  double alpha = 0.0;
};

/// Coordinates under grad(psi).
struct DualPoint {
  double eta_bar = 0.0;
  double eta_prime = 0.0;
};

struct PhaseVelocity {
  double bar = 0.0;
  double prime = 0.0;
};

inline void require_feasible(const PhasePoint& p) {
  if (!(p.phi_prime > 0.0)) {
    throw InfeasiblePoint("separation must be positive, got " + std::to_string(p.phi_prime));
  }
  if (!(p.alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
}

inline DualPoint grad_psi(const PhasePoint& p) {
  require_feasible(p);
  return {p.phi_bar, p.phi_prime - p.alpha / p.phi_prime};
}

/// Positive root of phi^2 - eta phi - alpha = 0. For eta < 0 the algebraically
/// equivalent form 2 alpha / (sqrt(eta^2 + 4 alpha) - eta) avoids cancellation.
inline PhasePoint grad_psi_inverse(const DualPoint& eta, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
  const double e = eta.eta_prime;
  const double root = std::sqrt(e * e + 4.0 * alpha);
  const double phi = e >= 0.0 ? 0.5 * (e + root) : 2.0 * alpha / (root - e);
  return {eta.eta_bar, phi, alpha};
}

/// Hessian of psi at p (diagonal).
inline PhaseVelocity hessian_psi(const PhasePoint& p, const PhaseVelocity& v) {
  require_feasible(p);
  return {v.bar, (1.0 + p.alpha / (p.phi_prime * p.phi_prime)) * v.prime};
}

/// Line in dual coordinates through grad(psi)(p0) with direction Hess(p0) v0,
/// mapped back. Its primal velocity at t = 0 is v0.
inline PhasePoint dual_geodesic(const PhasePoint& p0, const PhaseVelocity& v0, double t) {
  const DualPoint e0 = grad_psi(p0);
  const PhaseVelocity w = hessian_psi(p0, v0);
  return grad_psi_inverse({e0.eta_bar + t * w.bar, e0.eta_prime + t * w.prime}, p0.alpha);
}

/// Straight line; after the separation reaches zero the merged pair moves on
/// with the mean velocity and zero separation.
inline PhasePoint euclidean_geodesic(const PhasePoint& p0, const PhaseVelocity& v0, double t) {
  return {p0.phi_bar + t * v0.bar, std::max(p0.phi_prime + t * v0.prime, 0.0), p0.alpha};
}

/// Time at which the Euclidean separation vanishes (infinite if it never does).
inline double merge_time(const PhasePoint& p0, const PhaseVelocity& v0) {
  return v0.prime < 0.0 ? -p0.phi_prime / v0.prime : INFINITY;
}

struct TrajectoryRow {
  double t;
  PhasePoint euclid;
  PhasePoint dual;
};

struct TrajectoryConfig {
  PhasePoint start{0.0, 1.0, 0.01};
  PhaseVelocity velocity{0.0, -1.0};
  double t_end = 3.0;
  int samples = 301;
};

inline std::vector<TrajectoryRow> sample_trajectories(const TrajectoryConfig& cfg) {
  if (cfg.samples < 2) throw std::invalid_argument("need at least two samples");
  std::vector<TrajectoryRow> rows;
  rows.reserve(cfg.samples);
  for (int k = 0; k < cfg.samples; ++k) {
    const double t = cfg.t_end * k / (cfg.samples - 1);
    rows.push_back({t, euclidean_geodesic(cfg.start, cfg.velocity, t), dual_geodesic(cfg.start, cfg.velocity, t)});
  }
  return rows;
}

/// Columns t, phi_bar_euclid, phi_prime_euclid, phi_bar_dual, phi_prime_dual.
inline void emit_trajectories(std::ostream& os, const std::vector<TrajectoryRow>& rows) {
  const auto old = os.precision(17);
  os << "t,phi_bar_euclid,phi_prime_euclid,phi_bar_dual,phi_prime_dual\n";
  for (const auto& r : rows) {
    os << r.t << ',' << r.euclid.phi_bar << ',' << r.euclid.phi_prime << ',' << r.dual.phi_bar << ','
       << r.dual.phi_prime << '\n';
  }
  os.precision(old);
}

}  // namespace igr
