#pragma once

// Ground truth and diagnostics: pre-shock Burgers solutions by the method of
// characteristics, fine-grid Lax-Friedrichs references, error norms and
// shock tracking.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "igr/errors.hpp"
#include "igr/grid.hpp"
#include "igr/schemes.hpp"

namespace igr {

/// Burgers solution u(x, t) = u0(y) with y + t u0(y) = x, valid before the
/// first crossing of characteristics.
class CharacteristicSolution {
 public:
  using Profile = std::function<double(double)>;

  /// `du0` is optional; without it derivatives are taken by centred
  /// differences. `period` is 0 for profiles on the whole line.
  CharacteristicSolution(Profile u0, Profile du0, double t, double period = 1.0)
      : u0_(std::move(u0)), du0_(std::move(du0)), t_(t), period_(period) {
    if (t_ < 0.0) throw std::invalid_argument("time must be non-negative");
    t_star_ = compute_breaking_time();
  }

  double time() const { return t_; }
  /// 1 / max(-u0'), infinite for profiles that never compress.
  double breaking_time() const { return t_star_; }

  double u0(double y) const { return u0_(y); }

  double du0(double y) const {
    if (du0_) return du0_(y);
    const double e = 1e-6;
    return (u0_(y + e) - u0_(y - e)) / (2.0 * e);
  }

 private:
  double compute_breaking_time() const {
    // Sample one period (or a generous window on the line) for the steepest descent.
    const double lo = period_ > 0.0 ? 0.0 : -10.0;
    const double span = period_ > 0.0 ? period_ : 20.0;
    const int samples = 20000;
    double steepest = 0.0;
    for (int k = 0; k < samples; ++k) {
      steepest = std::max(steepest, -du0(lo + span * k / samples));
    }
    return steepest > 0.0 ? 1.0 / steepest : std::numeric_limits<double>::infinity();
  }

  Profile u0_;
  Profile du0_;
  double t_;
  double period_;
  double t_star_;
};

/// Velocity at x: bisection on the monotone foot-point map followed by a
/// Newton polish to 1e-12.
inline double characteristics_eval(const CharacteristicSolution& sol, double x) {
  const double t = sol.time();
  if (t >= sol.breaking_time()) {
    throw PostShock("characteristics have crossed: t = " + std::to_string(t) +
                    " >= breaking time " + std::to_string(sol.breaking_time()));
  }
  if (t == 0.0) return sol.u0(x);

  auto g = [&](double y) { return y + t * sol.u0(y) - x; };
  double step = std::max(1e-3, t * std::abs(sol.u0(x)));
  double lo = x - step, hi = x + step;
  int expansions = 0;
  while (!(g(lo) <= 0.0 && g(hi) >= 0.0)) {
    step *= 2.0;
    lo = x - step;
    hi = x + step;
    if (++expansions > 200) throw std::logic_error("foot point not bracketed before the shock time");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(x)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) <= 0.0 ? lo : hi) = mid;
  }
  double y = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const double slope = 1.0 + t * sol.du0(y);
    const double next = y - g(y) / slope;
    if (!(next >= lo && next <= hi)) break;
    if (std::abs(next - y) < 1e-12) {
      y = next;
      break;
    }
    y = next;
  }
  return sol.u0(y);
}

/// Block average of a fine state onto `n` cells per axis. Density and
/// momentum are averaged separately so totals are preserved.
inline State coarsen(const State& fine, int n) {
  const Grid& gf = fine.grid();
  if (n <= 0 || gf.n % n != 0) {
    throw IncompatibleResolution("fine resolution " + std::to_string(gf.n) +
                                 " is not a multiple of " + std::to_string(n));
  }
  const int r = gf.n / n;
  const Grid gc = Grid::make(gf.dim, n, gf.length);
  State out(gc);
  const double w = 1.0 / (gf.dim == 1 ? r : r * r);
  const int rows = gf.dim == 2 ? gf.n : 1;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < gf.n; ++i) {
      const std::size_t f = gf.index(i, j);
      const std::size_t c = gc.index(i / r, gf.dim == 2 ? j / r : 0);
      out.rho(c) += w * fine.rho(f);
      for (int k = 0; k < gf.dim; ++k) out.mom(c, k) += w * fine.mom(f, k);
    }
  }
  return out;
}

using InitialCondition = std::function<State(const Grid&)>;

/// Lax-Friedrichs with alpha = 0 at resolution n_ref, kept at full resolution.
inline RunResult reference_run(const InitialCondition& ic, const RunConfig& run, int dim, int n_ref,
                               double length = 1.0) {
  RunConfig ref = run;
  ref.scheme = SchemeKind::LF;
  ref.flux.alpha = 0.0;
  return advance(ic(Grid::make(dim, n_ref, length)), ref);
}

/// Every snapshot of a fine run block-averaged onto n cells per axis.
inline RunResult coarsen_run(const RunResult& fine, int n) {
  const int n_ref = fine.final.state.grid().n;
  if (n_ref < 4 * n) {
    throw IncompatibleResolution("reference resolution must be at least 4x the study resolution");
  }
  RunResult out = fine;
  for (Snapshot& s : out.snapshots) s.state = coarsen(s.state, n);
  out.final.state = coarsen(out.final.state, n);
  return out;
}

/// Lax-Friedrichs with alpha = 0 at resolution n_ref, snapshots coarsened to n.
inline RunResult fine_reference(const InitialCondition& ic, const RunConfig& run, int dim, int n,
                                int n_ref, double length = 1.0) {
  if (n_ref < 4 * n) {
    throw IncompatibleResolution("reference resolution must be at least 4x the study resolution");
  }
  if (n_ref % n != 0) {
    throw IncompatibleResolution("reference resolution must be a multiple of the study resolution");
  }
  return coarsen_run(reference_run(ic, run, dim, n_ref, length), n);
}

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

struct StateNorms {
  Norms rho;
  std::vector<Norms> u;  // one entry per velocity component
};

/// Grid-weighted norms of a - b; cells with mask[c] == false are skipped.
inline Norms difference_norms(std::span<const double> a, std::span<const double> b, double cell_volume,
                              const std::vector<bool>* mask = nullptr) {
  if (a.size() != b.size()) throw ShapeMismatch("norm arguments differ in size");
  Norms out;
  double sq = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (mask && !(*mask)[c]) continue;
    const double d = std::abs(a[c] - b[c]);
    out.l1 += d;
    sq += d * d;
    out.linf = std::max(out.linf, d);
  }
  out.l1 *= cell_volume;
  out.l2 = std::sqrt(sq * cell_volume);
  return out;
}

inline StateNorms error_norms(const State& a, const State& b, const std::vector<bool>* mask = nullptr) {
  if (!(a.grid() == b.grid())) throw ShapeMismatch("states live on different grids");
  if (mask && mask->size() != a.grid().cells()) throw ShapeMismatch("mask size differs from grid");
  const double vol = a.grid().cell_volume();
  StateNorms out;
  out.rho = difference_norms(a.rho.component(0), b.rho.component(0), vol, mask);
  const VectorField ua = velocity(a);
  const VectorField ub = velocity(b);
  for (int k = 0; k < a.grid().dim; ++k) {
    out.u.push_back(difference_norms(ua.component(k), ub.component(k), vol, mask));
  }
  return out;
}

/// Position of the steepest velocity gradient, refined by a parabola through
/// the three cells around the maximum. Result lies in [0, length).
inline double shock_position(const State& s) {
  const Grid& g = s.grid();
  if (g.dim != 1) throw ShapeMismatch("shock_position needs a 1D state");
  const TensorField du = central_gradient(velocity(s));
  std::size_t k = 0;
  for (std::size_t c = 1; c < g.cells(); ++c) {
    if (std::abs(du(c)) > std::abs(du(k))) k = c;
  }
  const double gm = std::abs(du(g.neighbor(k, 0, -1)));
  const double g0 = std::abs(du(k));
  const double gp = std::abs(du(g.neighbor(k, 0, 1)));
  const double curvature = gm - 2.0 * g0 + gp;
  double offset = curvature < 0.0 ? 0.5 * (gm - gp) / curvature : 0.0;
  offset = std::clamp(offset, -0.5, 0.5);
  double x = g.center(static_cast<int>(k)) + offset * g.h;
  x = std::fmod(x, g.length);
  if (x < 0.0) x += g.length;
  return x;
}

/// Least-squares slope of periodic positions against time; consecutive
/// positions are unwrapped so a front crossing the boundary stays continuous.
inline double regression_slope(const std::vector<double>& t, std::vector<double> x, double period) {
  if (t.size() != x.size() || t.size() < 2) throw std::invalid_argument("need at least two samples");
  for (std::size_t k = 1; k < x.size(); ++k) {
    while (x[k] - x[k - 1] > 0.5 * period) x[k] -= period;
    while (x[k] - x[k - 1] < -0.5 * period) x[k] += period;
  }
  const double n = static_cast<double>(t.size());
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    num += (t[k] - tm) * (x[k] - xm);
    den += (t[k] - tm) * (t[k] - tm);
  }
  return num / den;
}

/// Largest velocity drop u(x - w) - u(x + w) across a window of 2w cells
/// along x (rows in 2D).
inline double shock_magnitude(const State& s, int half_width) {
  const Grid& g = s.grid();
  const VectorField u = velocity(s);
  double best = 0.0;
  const int rows = g.dim == 2 ? g.n : 1;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < g.n; ++i) {
      best = std::max(best, u(g.index(i - half_width, j), 0) - u(g.index(i + half_width, j), 0));
    }
  }
  return best;
}

/// Cells farther than `band` cells (Chebyshev distance) from every strongly
/// compressive cell. A cell is compressive when -div u exceeds `fraction`
/// of its maximum.
inline std::vector<bool> away_from_shocks(const State& s, int band, double fraction = 0.2) {
  const Grid& g = s.grid();
  const ScalarField compression = divergence(velocity(s));
  double peak = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) peak = std::max(peak, -compression(c));
  std::vector<bool> keep(g.cells(), true);
  if (peak <= 0.0) return keep;
  const int rows = g.dim == 2 ? g.n : 1;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    if (-compression(c) < fraction * peak) continue;
    const int i = g.i_of(c);
    const int j = g.j_of(c);
    for (int dj = (rows > 1 ? -band : 0); dj <= (rows > 1 ? band : 0); ++dj) {
      for (int di = -band; di <= band; ++di) keep[g.index(i + di, j + dj)] = false;
    }
  }
  return keep;
}

}  // namespace igr
