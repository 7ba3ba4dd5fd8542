#pragma once

// Explicit time integration on periodic grids: Lax-Friedrichs, two-step
// (Richtmyer) Lax-Wendroff, and the mixed scheme that advances momentum with
// Lax-Wendroff and density with Lax-Friedrichs. Every update is in
// conservative flux-difference form.

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "igr/errors.hpp"
#include "igr/grid.hpp"
#include "igr/physics.hpp"

namespace igr {

enum class SchemeKind { LF, LW, LW_IGR, MIXED_IGR };

inline const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::LF: return "lf";
    case SchemeKind::LW: return "lw";
    case SchemeKind::LW_IGR: return "lw-igr";
    case SchemeKind::MIXED_IGR: return "mixed-igr";
  }
  return "?";
}

inline std::optional<SchemeKind> scheme_from_string(const std::string& s) {
  if (s == "lf") return SchemeKind::LF;
  if (s == "lw") return SchemeKind::LW;
  if (s == "lw-igr") return SchemeKind::LW_IGR;
  if (s == "mixed-igr") return SchemeKind::MIXED_IGR;
  return std::nullopt;
}

struct RunConfig {
  SchemeKind scheme = SchemeKind::LF;
  double cfl = 0.4;
  double t_end = 0.0;
  FluxSpec flux;
  std::vector<double> snapshot_times;  // t_end is always added
  EllipticOptions elliptic;
  // The run ends once the stable step stays below dt_collapse times the
  // first one for collapse_patience consecutive steps.
  double dt_collapse = 1e-8;
  long collapse_patience = 10000;
};

/// Warm-start caches and per-step counters threaded through the steppers.
struct StepContext {
  EllipticOptions elliptic;
  CorrectionCache cells;
  CorrectionCache faces[2];
  long step_index = 0;          // drives the x/y sweep alternation
  int elliptic_iterations = 0;  // accumulated over the latest step
};

/// Largest stable step: cfl * h / max(|u_axis| + c). When the wave speed
/// vanishes the step to `t_next` is returned. The result never overshoots
/// `t_next`.
inline double cfl_dt(const State& s, const std::optional<PressureLaw>& law, double cfl, double h,
                     double t = 0.0, double t_next = std::numeric_limits<double>::infinity()) {
  check_positive(s.rho);
  const Grid& g = s.grid();
  double speed = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const double snd = law ? sound_speed(*law, s.rho(c)) : 0.0;
    for (int r = 0; r < g.dim; ++r) speed = std::max(speed, std::abs(s.mom(c, r) / s.rho(c)) + snd);
  }
  double dt = speed > 0.0 ? cfl * h / speed : t_next - t;
  if (t + dt >= t_next) dt = t_next - t;
  return dt;
}

namespace detail {

/// Number of conserved components: density then momentum components.
inline int conserved_count(const Grid& g) { return 1 + g.dim; }

inline std::span<const double> conserved(const State& s, int k) {
  return k == 0 ? s.rho.component(0) : s.mom.component(k - 1);
}
inline std::span<double> conserved(State& s, int k) {
  return k == 0 ? s.rho.component(0) : s.mom.component(k - 1);
}
/// Flux of conserved component k along `axis`.
inline std::span<const double> flux_of(const Flux& f, const Grid& g, int k, int axis) {
  return k == 0 ? f.mass.component(axis) : f.momentum.component((k - 1) * g.dim + axis);
}

inline void count_iterations(StepContext& ctx, const CorrectionCache& cache) {
  ctx.elliptic_iterations += cache.report.iterations;
}

/// 1D Lax-Friedrichs update of one component along `axis`.
inline void lf_line(const Grid& g, std::span<const double> q, std::span<const double> f,
                    std::span<double> out, double dt, int axis) {
  const double nu = dt / (2.0 * g.h);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const std::size_t p = g.neighbor(c, axis, 1);
    const std::size_t m = g.neighbor(c, axis, -1);
    out[c] = 0.5 * (q[m] + q[p]) - nu * (f[p] - f[m]);
  }
}

enum class DensityUpdate { lax_wendroff, lax_friedrichs };

/// One Richtmyer sweep along `axis`. Interface states q_{i+1/2} are stored
/// at index i; their fluxes (including a fresh IGR correction) drive the
/// conservative update.
inline State richtmyer_sweep(const State& s, const FluxSpec& spec, double dt, int axis,
                             DensityUpdate density, StepContext& ctx) {
  const Grid& g = s.grid();
  const double nu = dt / g.h;
  const Flux f = total_flux(spec, s, ctx.elliptic, &ctx.cells);
  count_iterations(ctx, ctx.cells);

  State half(g);
  for (int k = 0; k < conserved_count(g); ++k) {
    const auto q = conserved(s, k);
    const auto fk = flux_of(f, g, k, axis);
    auto qh = conserved(half, k);
    for (std::size_t c = 0; c < g.cells(); ++c) {
      const std::size_t p = g.neighbor(c, axis, 1);
      qh[c] = 0.5 * (q[c] + q[p]) - 0.5 * nu * (fk[p] - fk[c]);
    }
  }
  // Throws NonPositiveDensity when the predictor already left the admissible set.
  const Flux fh = total_flux(spec, half, ctx.elliptic, &ctx.faces[axis]);
  count_iterations(ctx, ctx.faces[axis]);

  State out(g);
  for (int k = 0; k < conserved_count(g); ++k) {
    const auto q = conserved(s, k);
    auto qn = conserved(out, k);
    if (k == 0 && density == DensityUpdate::lax_friedrichs) {
      lf_line(g, q, flux_of(f, g, 0, axis), qn, dt, axis);
      continue;
    }
    const auto fk = flux_of(fh, g, k, axis);
    for (std::size_t c = 0; c < g.cells(); ++c) {
      const std::size_t m = g.neighbor(c, axis, -1);
      qn[c] = q[c] - nu * (fk[c] - fk[m]);
    }
  }
  return out;
}

inline State split_step(const State& s, const FluxSpec& spec, double dt, DensityUpdate density,
                        StepContext& ctx) {
  ctx.elliptic_iterations = 0;
  const Grid& g = s.grid();
  State out;
  if (g.dim == 1) {
    out = richtmyer_sweep(s, spec, dt, 0, density, ctx);
  } else {
    const int first = ctx.step_index % 2 == 0 ? 0 : 1;
    out = richtmyer_sweep(s, spec, dt, first, density, ctx);
    out = richtmyer_sweep(out, spec, dt, 1 - first, density, ctx);
  }
  ++ctx.step_index;
  check_state(out);
  return out;
}

}  // namespace detail

/// Lax-Friedrichs: neighbour mean over the 2d axis neighbours minus the
/// centred flux difference.
inline State lf_step(const State& s, const FluxSpec& spec, double dt, StepContext& ctx) {
  ctx.elliptic_iterations = 0;
  const Grid& g = s.grid();
  const Flux f = total_flux(spec, s, ctx.elliptic, &ctx.cells);
  detail::count_iterations(ctx, ctx.cells);
  State out(g);
  if (g.dim == 1) {
    for (int k = 0; k < detail::conserved_count(g); ++k) {
      detail::lf_line(g, detail::conserved(s, k), detail::flux_of(f, g, k, 0),
                      detail::conserved(out, k), dt, 0);
    }
  } else {
    const double nu = dt / (2.0 * g.h);
    const double w = 1.0 / (2.0 * g.dim);
    for (int k = 0; k < detail::conserved_count(g); ++k) {
      const auto q = detail::conserved(s, k);
      auto qn = detail::conserved(out, k);
      for (std::size_t c = 0; c < g.cells(); ++c) {
        double mean = 0.0, diff = 0.0;
        for (int axis = 0; axis < g.dim; ++axis) {
          const auto fa = detail::flux_of(f, g, k, axis);
          const std::size_t p = g.neighbor(c, axis, 1);
          const std::size_t m = g.neighbor(c, axis, -1);
          mean += q[p] + q[m];
          diff += fa[p] - fa[m];
        }
        qn[c] = w * mean - nu * diff;
      }
    }
  }
  ++ctx.step_index;
  check_state(out);
  return out;
}

/// Two-step Lax-Wendroff (Richtmyer); dimension-by-dimension in 2D with the
/// sweep order alternating every step.
inline State lw_step(const State& s, const FluxSpec& spec, double dt, StepContext& ctx) {
  return detail::split_step(s, spec, dt, detail::DensityUpdate::lax_wendroff, ctx);
}

/// Momentum from the Lax-Wendroff update, density from Lax-Friedrichs, both
/// built from the same flux evaluations.
inline State mixed_step(const State& s, const FluxSpec& spec, double dt, StepContext& ctx) {
  return detail::split_step(s, spec, dt, detail::DensityUpdate::lax_friedrichs, ctx);
}

inline State lf_step(const State& s, const FluxSpec& spec, double dt) {
  StepContext ctx;
  return lf_step(s, spec, dt, ctx);
}
inline State lw_step(const State& s, const FluxSpec& spec, double dt) {
  StepContext ctx;
  return lw_step(s, spec, dt, ctx);
}
inline State mixed_step(const State& s, const FluxSpec& spec, double dt) {
  StepContext ctx;
  return mixed_step(s, spec, dt, ctx);
}

inline State step(SchemeKind kind, const State& s, const FluxSpec& spec, double dt,
                  StepContext& ctx) {
  switch (kind) {
    case SchemeKind::LF: return lf_step(s, spec, dt, ctx);
    case SchemeKind::LW:
    case SchemeKind::LW_IGR: return lw_step(s, spec, dt, ctx);
    case SchemeKind::MIXED_IGR: return mixed_step(s, spec, dt, ctx);
  }
  throw std::logic_error("unknown scheme");
}

struct Snapshot {
  double t = 0.0;
  State state;
};

struct RunStats {
  long steps = 0;
  std::vector<double> dt;
  std::vector<int> elliptic_iterations;  // per step, summed over its solves
};

/// Why a run stopped early.
struct Blowup {
  enum class Kind { non_positive_density, non_finite, elliptic, step_collapse };
  Kind kind = Kind::non_finite;
  double time = 0.0;
  long step = 0;
  std::string cause;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  RunStats stats;
  std::optional<Blowup> failure;
  Snapshot final;  // last admissible state, also when the run stopped early

  bool completed() const { return !failure.has_value(); }
  const Snapshot& last() const { return snapshots.back(); }
};

using StepObserver = std::function<void(double t, const State&)>;

/// Snapshot targets: requested times plus t_end, sorted and deduplicated.
inline std::vector<double> snapshot_targets(const RunConfig& run) {
  std::vector<double> targets = run.snapshot_times;
  targets.push_back(run.t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  for (double t : targets) {
    if (t < 0.0 || t > run.t_end) throw std::invalid_argument("snapshot time outside [0, t_end]");
  }
  return targets;
}

/// Time loop. Steps land exactly on every snapshot time. Density collapse,
/// non-finite values, elliptic failures and a persistently collapsed stable step end the
/// run with a Blowup record and the snapshots gathered so far.
inline RunResult advance(const State& initial, const RunConfig& run,
                         const StepObserver& observer = {}) {
  run.flux.validate();
  if (!(run.cfl > 0.0 && run.cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
  check_state(initial);

  RunResult result;
  const auto targets = snapshot_targets(run);
  StepContext ctx;
  ctx.elliptic = run.elliptic;

  State s = initial;
  double t = 0.0;
  std::size_t next = 0;
  double first_dt = 0.0;
  long collapsed = 0;
  while (next < targets.size() && targets[next] <= 0.0) {
    result.snapshots.push_back({0.0, s});
    ++next;
  }
  if (observer) observer(t, s);

  while (next < targets.size()) {
    const double target = targets[next];
    try {
      const double stable = cfl_dt(s, run.flux.pressure, run.cfl, s.grid().h);
      if (first_dt == 0.0 && std::isfinite(stable)) first_dt = stable;
      collapsed = stable < run.dt_collapse * first_dt ? collapsed + 1 : 0;
      if (collapsed > run.collapse_patience) {
        char msg[64];
        std::snprintf(msg, sizeof msg, "time step collapsed to %.3g", stable);
        result.failure = Blowup{Blowup::Kind::step_collapse, t, result.stats.steps, msg};
        break;
      }
      const double dt = t + stable >= target ? target - t : stable;
      s = step(run.scheme, s, run.flux, dt, ctx);
      t = (t + dt >= target) ? target : t + dt;
      ++result.stats.steps;
      result.stats.dt.push_back(dt);
      result.stats.elliptic_iterations.push_back(ctx.elliptic_iterations);
    } catch (const NonPositiveDensity& e) {
      result.failure = Blowup{Blowup::Kind::non_positive_density, t, result.stats.steps, e.what()};
    } catch (const NonFiniteValue& e) {
      result.failure = Blowup{Blowup::Kind::non_finite, t, result.stats.steps, e.what()};
    } catch (const NoConvergence& e) {
      result.failure = Blowup{Blowup::Kind::elliptic, t, result.stats.steps, std::string("elliptic solve: ") + e.what()};
    } catch (const SingularOperator& e) {
      result.failure = Blowup{Blowup::Kind::elliptic, t, result.stats.steps, std::string("elliptic solve: ") + e.what()};
    }
    if (result.failure) break;
    if (observer) observer(t, s);
    if (t == target) {
      result.snapshots.push_back({t, s});
      ++next;
    }
  }
  result.final = {t, std::move(s)};
  return result;
}

}  // namespace igr
