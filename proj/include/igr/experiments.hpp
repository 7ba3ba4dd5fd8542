#pragma once

// Preset drivers: expand a resolved preset into solver runs, execute them,
// collect diagnostics and write snapshot CSVs, a summary table and plots.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "igr/config.hpp"
#include "igr/geodesic.hpp"
#include "igr/output.hpp"
#include "igr/presets.hpp"
#include "igr/reference.hpp"
#include "igr/schemes.hpp"

#ifndef IGR_GIT_DESCRIBE
#define IGR_GIT_DESCRIBE "unknown"
#endif

namespace igr {

inline const char* git_describe() { return IGR_GIT_DESCRIBE; }

/// One solver run requested by a preset.
struct RunPlan {
  std::string label;
  int dim = 1;
  int n = 0;
  SchemeKind scheme = SchemeKind::LF;
  double alpha = 0.0;
  double a = 0.0;
  bool hold_density = false;
  std::string reference_key;  // empty: compared with nothing
};

/// One fine reference shared by the runs naming its key.
struct ReferencePlan {
  std::string key;
  int dim = 1;
  int n_ref = 0;
  double a = 0.0;
};

struct RunRecord {
  RunPlan plan;
  RunConfig config;
  State initial;
  RunResult result;
  std::optional<RunResult> reference;  // coarsened to the run's resolution
  std::vector<double> snapshot_tv_ratio;
  double max_tv_ratio = 0.0;  // over every admissible step
  double conservation_drift = 0.0;
};

struct PresetOutcome {
  ExperimentPreset preset;
  std::vector<RunRecord> runs;
  std::map<double, std::vector<TrajectoryRow>> trajectories;  // geodesic preset, keyed by alpha
  std::vector<std::string> summary_columns;
  std::vector<std::vector<std::string>> summary_rows;

  const RunRecord* find(const std::string& label) const {
    for (const auto& r : runs) {
      if (r.plan.label == label) return &r;
    }
    return nullptr;
  }
};

struct PresetOptions {
  std::optional<std::filesystem::path> out_dir;
  bool parallel = true;
  bool plots = true;
};

/// Smallest multiple of n that is at least max(n_ref, 4 n).
inline int compatible_reference(int n, int n_ref) {
  const int want = std::max(n_ref, 4 * n);
  return (want + n - 1) / n * n;
}

inline std::vector<RunPlan> plan_runs(const ExperimentPreset& p, std::vector<ReferencePlan>* refs = nullptr) {
  std::vector<RunPlan> runs;
  std::vector<ReferencePlan> fine;
  const int dim = p.dim();
  auto study = [&](const std::string& label, int n, double a, const std::string& ref) {
    runs.push_back({label, dim, n, p.scheme, p.alpha_at(n), a, p.hold_density, ref});
  };

  if (p.name == "geodesic-fig3") {
    // closed form only
  } else if (!p.sweep_a.empty()) {
    for (double a : p.sweep_a) {
      const std::string key = "reference_a" + format_number(a);
      study("igr_a" + format_number(a), p.n, a, p.n_ref > 0 ? key : "");
      if (p.n_ref > 0) fine.push_back({key, dim, compatible_reference(p.n, p.n_ref), a});
    }
  } else if (!p.levels.empty()) {
    int n_ref = p.n_ref;
    for (int m : p.levels) n_ref = std::max(n_ref, 4 * p.n * m);
    for (int m : p.levels) {
      if (n_ref % (p.n * m) != 0) n_ref = compatible_reference(p.n * m, n_ref);
    }
    for (int m : p.levels) study("igr_n" + std::to_string(p.n * m), p.n * m, p.a, p.n_ref > 0 ? "reference" : "");
    if (p.n_ref > 0) fine.push_back({"reference", dim, n_ref, p.a});
  } else {
    study("igr", p.n, p.a, p.n_ref > 0 ? "reference" : "");
    if (p.n_ref > 0) fine.push_back({"reference", dim, compatible_reference(p.n, p.n_ref), p.a});
    if (p.baselines) {
      // Burgers baselines evolve the velocity alone.
      const bool hold = p.flux == FluxKind::burgers1d ? true : p.hold_density;
      const std::string ref = p.n_ref > 0 ? "reference" : "";
      runs.push_back({"lf", dim, p.n, SchemeKind::LF, 0.0, p.a, hold, ref});
      runs.push_back({"lw", dim, p.n, SchemeKind::LW, 0.0, p.a, hold, ref});
    }
    if (p.companion_1d > 0) {
      const int m = p.companion_1d;
      runs.push_back({"igr_1d", 1, m, p.scheme, p.alpha_at(m), p.a, false, p.n_ref > 0 ? "reference_1d" : ""});
      if (p.n_ref > 0) fine.push_back({"reference_1d", 1, compatible_reference(m, p.n_ref), p.a});
    }
  }
  if (refs) *refs = std::move(fine);
  return runs;
}

namespace detail {

inline RunConfig config_for(const ExperimentPreset& p, int dim, SchemeKind scheme, double alpha, double a, bool hold) {
  ExperimentPreset q = p;
  q.hold_density = hold;
  if (dim == 1 && q.flux == FluxKind::euler2d) q.flux = FluxKind::euler1d;
  return q.run_config(scheme, alpha, a);
}

inline InitialData initial_for(const ExperimentPreset& p, int dim) {
  return dim == 1 && p.initial == InitialData::sine_2d ? InitialData::sine : p.initial;
}

inline double velocity_tv(const State& s) { return total_variation(velocity(s).component(0), s.grid()); }

/// Largest change of a conserved total relative to max(|sum q0|, sum |q0|).
inline double conservation_drift(const State& a, const State& b) {
  double worst = 0.0;
  auto check = [&](std::span<const double> q0, std::span<const double> q1) {
    double s0 = 0.0, s1 = 0.0, abs0 = 0.0;
    for (std::size_t c = 0; c < q0.size(); ++c) {
      s0 += q0[c];
      s1 += q1[c];
      abs0 += std::abs(q0[c]);
    }
    const double scale = std::max(std::abs(s0), abs0);
    if (scale > 0.0) worst = std::max(worst, std::abs(s1 - s0) / scale);
  };
  check(a.rho.component(0), b.rho.component(0));
  for (int k = 0; k < a.grid().dim; ++k) check(a.mom.component(k), b.mom.component(k));
  return worst;
}

inline RunRecord execute(const ExperimentPreset& p, const RunPlan& plan) {
  RunRecord rec;
  rec.plan = plan;
  rec.config = config_for(p, plan.dim, plan.scheme, plan.alpha, plan.a, plan.hold_density);
  rec.initial = initial_state(initial_for(p, plan.dim), Grid::make(plan.dim, plan.n, p.length));
  const double tv0 = velocity_tv(rec.initial);
  double max_tv = 0.0;
  rec.result = advance(rec.initial, rec.config, [&](double, const State& s) { max_tv = std::max(max_tv, velocity_tv(s)); });
  rec.max_tv_ratio = tv0 > 0.0 ? max_tv / tv0 : 0.0;
  for (const auto& snap : rec.result.snapshots) {
    rec.snapshot_tv_ratio.push_back(tv0 > 0.0 ? velocity_tv(snap.state) / tv0 : 0.0);
  }
  rec.conservation_drift = conservation_drift(rec.initial, rec.result.final.state);
  return rec;
}

inline RunResult execute_reference(const ExperimentPreset& p, const ReferencePlan& ref) {
  const RunConfig rc = config_for(p, ref.dim, SchemeKind::LF, 0.0, ref.a, p.hold_density);
  const InitialData kind = initial_for(p, ref.dim);
  return reference_run([&](const Grid& g) { return initial_state(kind, g); }, rc, ref.dim, ref.n_ref, p.length);
}

template <class T, class F>
std::vector<T> run_all(std::size_t count, bool parallel, F&& job) {
  std::vector<T> out;
  out.reserve(count);
  if (!parallel) {
    for (std::size_t k = 0; k < count; ++k) out.push_back(job(k));
    return out;
  }
  std::vector<std::future<T>> pending;
  for (std::size_t k = 0; k < count; ++k) pending.push_back(std::async(std::launch::async, job, k));
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

inline std::string domain_text(const ExperimentPreset& p, int dim) {
  const std::string side = "[0," + format_number(p.length) + ")";
  return dim == 2 ? side + "x" + side : side;
}

inline void set_meta(Metadata& meta, const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta) {
    if (k == key) {
      v = value;
      return;
    }
  }
  meta.emplace_back(key, value);
}

inline Metadata run_metadata(const ExperimentPreset& p, const RunPlan& plan, const RunConfig& rc, double t) {
  Metadata meta = describe(p);
  set_meta(meta, "run", plan.label);
  set_meta(meta, "scheme", to_string(rc.scheme));
  set_meta(meta, "n", std::to_string(plan.n));
  set_meta(meta, "alpha", format_number(rc.flux.alpha));
  set_meta(meta, "a", format_number(plan.a));
  set_meta(meta, "dim", std::to_string(plan.dim));
  set_meta(meta, "flux", to_string(rc.flux.kind));
  set_meta(meta, "velocity-form", rc.flux.velocity_form ? "true" : "false");
  set_meta(meta, "initial", to_string(initial_for(p, plan.dim)));
  set_meta(meta, "t", format_number(t));
  set_meta(meta, "domain", domain_text(p, plan.dim));
  set_meta(meta, "git-describe", git_describe());
  return meta;
}

/// x and u along the middle row (the whole line in 1D).
inline Series slice(const State& s, const std::string& label) {
  const Grid& g = s.grid();
  const VectorField u = velocity(s);
  Series out{label, {}, {}};
  const int j = g.dim == 2 ? g.n / 2 : 0;
  for (int i = 0; i < g.n; ++i) {
    out.x.push_back(g.center(i));
    out.y.push_back(u(g.index(i, j), 0));
  }
  return out;
}

inline std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%.4f", t);
  return buf;
}

}  // namespace detail

inline void summarize(PresetOutcome& out) {
  out.summary_columns = {"run",        "scheme",    "n",      "alpha",   "a",          "completed", "failure_time",
                         "steps",      "t_final",   "max_tv_ratio", "conservation_drift", "l1_u_error",
                         "l1_u_error_masked", "shock_magnitude", "reference_shock_magnitude"};
  out.summary_rows.clear();
  for (const auto& r : out.runs) {
    std::vector<std::string> row = {r.plan.label,
                                    to_string(r.config.scheme),
                                    std::to_string(r.plan.n),
                                    format_number(r.config.flux.alpha),
                                    format_number(r.plan.a),
                                    r.result.completed() ? "true" : "false",
                                    r.result.failure ? format_number(r.result.failure->time) : "",
                                    std::to_string(r.result.stats.steps),
                                    format_number(r.result.final.t),
                                    format_number(r.max_tv_ratio),
                                    format_number(r.conservation_drift)};
    const State& fin = r.result.final.state;
    const int half = std::max(1, r.plan.n / 100);
    if (r.reference && r.result.completed()) {
      const State& ref = r.reference->final.state;
      const auto mask = away_from_shocks(ref, 6);
      row.push_back(format_number(error_norms(fin, ref).u[0].l1));
      row.push_back(format_number(error_norms(fin, ref, &mask).u[0].l1));
      row.push_back(format_number(shock_magnitude(fin, half)));
      row.push_back(format_number(shock_magnitude(ref, half)));
    } else {
      row.insert(row.end(), {"", "", r.result.completed() ? format_number(shock_magnitude(fin, half)) : "", ""});
    }
    out.summary_rows.push_back(std::move(row));
  }
}

inline void write_outputs(const PresetOutcome& out, const std::filesystem::path& dir, bool plots) {
  const ExperimentPreset& p = out.preset;
  if (!out.trajectories.empty()) {
    std::vector<std::vector<std::string>> summary;
    std::vector<Series> series;
    for (const auto& [alpha, rows] : out.trajectories) {
      const std::filesystem::path path = dir / ("trajectories_alpha" + format_number(alpha) + ".csv");
      std::ofstream os = open_for_writing(path);
      Metadata meta = describe(p);
      detail::set_meta(meta, "alpha", format_number(alpha));
      detail::set_meta(meta, "git-describe", git_describe());
      for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
      emit_trajectories(os, rows);
      if (!os) throw IoError("write failed for " + path.string());
      Series dual{"dual alpha=" + format_number(alpha), {}, {}};
      for (const auto& r : rows) {
        dual.x.push_back(r.t);
        dual.y.push_back(r.dual.phi_prime);
      }
      series.push_back(std::move(dual));
    }
    if (plots) {
      Series euclid{"euclidean", {}, {}};
      for (const auto& r : out.trajectories.begin()->second) {
        euclid.x.push_back(r.t);
        euclid.y.push_back(r.euclid.phi_prime);
      }
      series.insert(series.begin(), std::move(euclid));
      emit_svg(series, dir / "separation.svg", {"separation of two characteristics", "t", "phi'"});
    }
    return;
  }

  std::map<double, std::vector<Series>> by_time;
  auto dump = [&](const RunPlan& plan, const RunConfig& rc, const RunResult& res, const std::string& label) {
    for (const auto& snap : res.snapshots) {
      emit_csv(snap.state, detail::run_metadata(p, plan, rc, snap.t),
               dir / (label + "_" + detail::time_tag(snap.t) + ".csv"));
      if (plan.dim == p.dim()) by_time[snap.t].push_back(detail::slice(snap.state, label));
    }
  };
  std::vector<std::string> seen;
  for (const auto& r : out.runs) {
    dump(r.plan, r.config, r.result, r.plan.label);
    if (r.reference && std::find(seen.begin(), seen.end(), r.plan.reference_key + std::to_string(r.plan.n)) == seen.end()) {
      seen.push_back(r.plan.reference_key + std::to_string(r.plan.n));
      RunPlan ref_plan = r.plan;
      ref_plan.scheme = SchemeKind::LF;
      ref_plan.alpha = 0.0;
      RunConfig ref_cfg = r.config;
      ref_cfg.scheme = SchemeKind::LF;
      ref_cfg.flux.alpha = 0.0;
      const bool single_level = p.levels.size() <= 1;
      dump(ref_plan, ref_cfg, *r.reference,
           single_level ? r.plan.reference_key : r.plan.reference_key + "_n" + std::to_string(r.plan.n));
    }
  }
  emit_table(dir / "summary.csv", describe(p), out.summary_columns, out.summary_rows);
  if (plots) {
    for (const auto& [t, series] : by_time) {
      emit_svg(series, dir / ("u_" + detail::time_tag(t) + ".svg"),
               {p.name + " " + detail::time_tag(t), "x", p.dim() == 2 ? "u (middle row)" : "u"});
    }
  }
}

/// Runs every solver the preset asks for. Blow-ups are recorded in the
/// affected run, not thrown.
inline PresetOutcome run_preset(const ExperimentPreset& p, const PresetOptions& opt = {}) {
  p.validate();
  PresetOutcome out;
  out.preset = p;

  if (!p.sweep_alpha.empty()) {
    for (double alpha : p.sweep_alpha) {
      TrajectoryConfig cfg;
      cfg.start.alpha = alpha;
      cfg.t_end = p.t_end;
      cfg.samples = std::max(p.n, 2);
      out.trajectories[alpha] = sample_trajectories(cfg);
    }
  } else {
    std::vector<ReferencePlan> refs;
    const auto plans = plan_runs(p, &refs);
    const std::size_t jobs = plans.size() + refs.size();
    struct Job {
      std::optional<RunRecord> run;
      std::optional<RunResult> ref;
    };
    auto results = detail::run_all<Job>(jobs, opt.parallel, [&](std::size_t k) {
      Job j;
      if (k < refs.size()) j.ref = detail::execute_reference(p, refs[k]);
      else j.run = detail::execute(p, plans[k - refs.size()]);
      return j;
    });
    for (std::size_t k = refs.size(); k < jobs; ++k) {
      RunRecord rec = std::move(*results[k].run);
      for (std::size_t r = 0; r < refs.size(); ++r) {
        if (refs[r].key == rec.plan.reference_key) rec.reference = coarsen_run(*results[r].ref, rec.plan.n);
      }
      out.runs.push_back(std::move(rec));
    }
  }
  summarize(out);
  if (opt.out_dir) write_outputs(out, *opt.out_dir, opt.plots);
  return out;
}

}  // namespace igr
