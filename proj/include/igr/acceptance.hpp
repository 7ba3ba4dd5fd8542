#pragma once

// Acceptance suite. Each criterion produces a pass/fail verdict with the
// measured numbers; preset runs are shared between criteria.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "igr/elliptic.hpp"
#include "igr/experiments.hpp"
#include "igr/geodesic.hpp"
#include "igr/reference.hpp"

namespace igr {

/// Every threshold used by the suite.
struct Tolerances {
  double conservation_1d = 1e-10;
  double conservation_2d = 1e-8;
  double elliptic_order = 2.0;
  double elliptic_order_band = 0.2;
  double dense_1d = 1e-11;
  double dense_2d = 1e-10;
  int spd_trials = 50;
  double symmetry = 1e-12;
  double lw_tv_growth = 1.10;
  double igr_tv_growth = 1.01;
  double refinement_gain = 0.3;
  double shock_cells = 2.0;          // allowed slope error: this many cells ...
  double shock_time_window = 0.3;    // ... per this much time
  double preshock_order = 2.0;
  double preshock_order_band = 0.3;
  double preshock_time = 0.02;
  double agreement_ratio = 3.0;
  int shock_band = 6;
  double collinearity = 1e-13;
  double alpha_slope = 1.0;
  double alpha_slope_band = 0.2;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  nlohmann::json values = nlohmann::json::object();
  double seconds = 0.0;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_passed() const {
    for (const auto& c : criteria) {
      if (!c.passed) return false;
    }
    return !criteria.empty();
  }
  nlohmann::json to_json() const {
    nlohmann::json out;
    out["passed"] = all_passed();
    out["git_describe"] = git_describe();
    out["criteria"] = nlohmann::json::array();
    for (const auto& c : criteria) {
      out["criteria"].push_back({{"id", c.id},
                                 {"name", c.name},
                                 {"passed", c.passed},
                                 {"detail", c.detail},
                                 {"values", c.values},
                                 {"seconds", c.seconds}});
    }
    return out;
  }
};

struct AcceptanceOptions {
  std::set<int> only;  // empty: all criteria
  bool parallel = true;
  std::optional<std::filesystem::path> artifacts;  // preset outputs land here when set
  Tolerances tol;
};

namespace acceptance {

constexpr double pi = std::numbers::pi;

/// Least-squares slope of log(y) against log(x).
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]) / n;
    my += std::log(y[k]) / n;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    num += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
    den += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
  }
  return num / den;
}

inline bool within(double v, double centre, double band) { return std::abs(v - centre) <= band; }

/// Lazily computed preset outcomes shared by all criteria.
class PresetCache {
 public:
  explicit PresetCache(const AcceptanceOptions& opt) : opt_(opt) {}

  const PresetOutcome& get(const std::string& name) {
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    PresetOptions po;
    po.parallel = opt_.parallel;
    if (opt_.artifacts) po.out_dir = *opt_.artifacts / name;
    return cache_.emplace(name, run_preset(*find_preset(name), po)).first->second;
  }

 private:
  AcceptanceOptions opt_;
  std::map<std::string, PresetOutcome> cache_;
};

// ---------------------------------------------------------------- conservation

inline CriterionResult conservation(PresetCache& presets, const Tolerances& tol) {
  CriterionResult res;
  res.id = 1;
  res.name = "conservation";
  double worst_1d = 0.0, worst_2d = 0.0;
  int runs = 0;
  auto account = [&](const std::string& what, int dim, double drift) {
    ++runs;
    (dim == 2 ? worst_2d : worst_1d) = std::max(dim == 2 ? worst_2d : worst_1d, drift);
    res.values["drift"][what] = drift;
  };
  for (const char* name : {"burgers-fig2", "euler-fig4", "euler-shock-speed", "euler-sound-sweep", "euler2d-fig8"}) {
    for (const auto& r : presets.get(name).runs) {
      if (r.result.completed()) account(std::string(name) + "/" + r.plan.label, r.plan.dim, r.conservation_drift);
    }
  }
  // Every scheme on short Euler runs, including plain LW before it breaks down.
  for (SchemeKind kind : {SchemeKind::LF, SchemeKind::LW, SchemeKind::LW_IGR, SchemeKind::MIXED_IGR}) {
    for (int dim : {1, 2}) {
      const int n = dim == 1 ? 200 : 32;
      ExperimentPreset p = *find_preset(dim == 1 ? "euler-fig4" : "euler2d-fig8");
      p.n = n;
      p.alpha = 20.0 / (n * n);
      p.t_end = 0.02;
      p.snapshot_times.clear();
      const RunConfig rc = p.run_config(kind, p.alpha, p.a);
      const State s0 = initial_state(p.initial, Grid::make(dim, n));
      const RunResult r = advance(s0, rc);
      if (!r.completed()) {
        res.detail = std::string("short run failed for ") + to_string(kind);
        return res;
      }
      account(std::string("short-") + to_string(kind) + "-" + std::to_string(dim) + "d", dim,
              detail::conservation_drift(s0, r.final.state));
    }
  }
  res.values["worst_1d"] = worst_1d;
  res.values["worst_2d"] = worst_2d;
  res.passed = worst_1d < tol.conservation_1d && worst_2d < tol.conservation_2d;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d runs, worst relative drift %.2e (1D), %.2e (2D)", runs, worst_1d, worst_2d);
  res.detail = buf;
  return res;
}

// ---------------------------------------------------------------- elliptic

inline double manufactured_1d_error(int n, double alpha) {
  const Grid g = Grid::make(1, n);
  ScalarField ups(g), rhs(g), exact(g);
  for (int i = 0; i < n; ++i) {
    const double x = g.center(i);
    const double s = std::sin(2 * pi * x), c = std::cos(2 * pi * x);
    ups(i) = 2.0 + s;
    exact(i) = c;
    rhs(i) = (2.0 + s) * c + 4.0 * pi * pi * alpha * c * (2.0 + 2.0 * s);
  }
  const ScalarField f = solve_H_1d(ups, alpha, rhs);
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::abs(f(i) - exact(i)));
  return err;
}

inline double manufactured_2d_error(int n, double alpha) {
  const Grid g = Grid::make(2, n);
  ScalarField ups(g);
  TensorField rhs(g), exact(g);
  const double a = alpha, p2 = pi * pi;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t q = g.index(i, j);
      const double x = g.center(i), y = g.center(j);
      const double sx = std::sin(2 * pi * x), cx = std::cos(2 * pi * x);
      const double sy = std::sin(2 * pi * y), cy = std::cos(2 * pi * y);
      const double sxy = std::sin(2 * pi * (x + y)), cxy = std::cos(2 * pi * (x + y));
      const double v = 2.0 + sx * cy;
      ups(q) = v;
      exact.at(q, 0, 0) = cx * sy;
      exact.at(q, 0, 1) = sx;
      exact.at(q, 1, 0) = cy;
      exact.at(q, 1, 1) = sxy;
      rhs.at(q, 0, 0) = (8 * p2 * a * (sx * cy + 1) + v) * sy * cx;
      rhs.at(q, 0, 1) = (4 * p2 * a * (v * cy - sx * sy * sy) + v) * sx;
      rhs.at(q, 1, 0) = 4 * p2 * a * (v * sxy - cx * cy * cxy) + v * cy;
      rhs.at(q, 1, 1) = 4 * p2 * a * (v * sxy + sx * sy * cxy) + v * sxy;
    }
  }
  EllipticOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 100 * n;
  const TensorField f = solve_H_2d(ups, alpha, rhs, opts);
  double err = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) err = std::max(err, std::abs(f.values()[k] - exact.values()[k]));
  return err;
}

/// Dense matrix of the 1D operator, assembled entry by entry.
inline Eigen::MatrixXd dense_1d(const std::vector<double>& ups, double alpha, double h) {
  const int n = static_cast<int>(ups.size());
  const double s = alpha / (h * h);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n, im = (i + n - 1) % n;
    const double up = 0.5 * (ups[i] + ups[ip]), um = 0.5 * (ups[i] + ups[im]);
    A(i, i) += ups[i] + s * (up + um);
    A(i, ip) -= s * up;
    A(i, im) -= s * um;
  }
  return A;
}

/// Dense matrix of the 2D tensor operator: compact second differences for
/// d_c(v d_c F_rc), centred differences on both sides of d_c(v d_k F_rk).
inline Eigen::MatrixXd dense_2d(const std::vector<double>& ups, double alpha, int n, double h) {
  const int N = n * n;
  const double s = alpha / (h * h);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4 * N, 4 * N);
  auto cell = [n](int i, int j) { return ((j % n + n) % n) * n + ((i % n + n) % n); };
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const int k = 1 - c;
      const int row0 = (2 * r + c) * N, colk = (2 * r + k) * N;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const int q = cell(i, j);
          const int qp = c == 0 ? cell(i + 1, j) : cell(i, j + 1);
          const int qm = c == 0 ? cell(i - 1, j) : cell(i, j - 1);
          const double up = 0.5 * (ups[q] + ups[qp]), um = 0.5 * (ups[q] + ups[qm]);
          A(row0 + q, row0 + q) += ups[q] + s * (up + um);
          A(row0 + q, row0 + qp) -= s * up;
          A(row0 + q, row0 + qm) -= s * um;
          // -alpha/(4h^2) [v(q+e_c)(F(q+e_c+e_k) - F(q+e_c-e_k)) - v(q-e_c)(F(q-e_c+e_k) - F(q-e_c-e_k))]
          for (int sc : {1, -1}) {
            const int ci = i + (c == 0 ? sc : 0), cj = j + (c == 1 ? sc : 0);
            const double w = -sc * alpha / (4 * h * h) * ups[cell(ci, cj)];
            for (int sk : {1, -1}) {
              const int ki = ci + (k == 0 ? sk : 0), kj = cj + (k == 1 ? sk : 0);
              A(row0 + q, colk + cell(ki, kj)) += w * sk;
            }
          }
        }
      }
    }
  }
  return A;
}

inline CriterionResult elliptic(const Tolerances& tol) {
  CriterionResult res;
  res.id = 2;
  res.name = "elliptic";
  std::vector<std::string> failures;
  const double alpha = 0.01;

  std::vector<double> hs, e1, e2;
  for (int n : {32, 64, 128, 256}) {
    hs.push_back(1.0 / n);
    e1.push_back(manufactured_1d_error(n, alpha));
  }
  const double order_1d = log_slope(hs, e1);
  std::vector<double> hs2;
  for (int n : {16, 32, 64}) {
    hs2.push_back(1.0 / n);
    e2.push_back(manufactured_2d_error(n, alpha));
  }
  const double order_2d = log_slope(hs2, e2);
  res.values["order_1d"] = order_1d;
  res.values["order_2d"] = order_2d;
  res.values["errors_1d"] = e1;
  res.values["errors_2d"] = e2;
  if (!within(order_1d, tol.elliptic_order, tol.elliptic_order_band)) failures.push_back("1D order");
  if (!within(order_2d, tol.elliptic_order, tol.elliptic_order_band)) failures.push_back("2D order");

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> coef(0.5, 3.0), val(-1.0, 1.0);

  {
    const Grid g = Grid::make(1, 32);
    ScalarField ups(g), b(g);
    std::vector<double> u(32);
    for (int i = 0; i < 32; ++i) ups(i) = u[i] = coef(rng), b(i) = val(rng);
    const Eigen::MatrixXd A = dense_1d(u, alpha, g.h);
    const Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.values().data(), 32);
    const Eigen::VectorXd x = A.partialPivLu().solve(bv);
    const ScalarField f = solve_H_1d(ups, alpha, b);
    const double rel = (Eigen::Map<const Eigen::VectorXd>(f.values().data(), 32) - x).norm() / x.norm();
    res.values["dense_1d_rel"] = rel;
    if (!(rel <= tol.dense_1d)) failures.push_back("1D dense oracle");
  }
  {
    const int n = 8;
    const Grid g = Grid::make(2, n);
    ScalarField ups(g);
    TensorField b(g);
    std::vector<double> u(n * n);
    for (int q = 0; q < n * n; ++q) ups(q) = u[q] = coef(rng);
    for (double& v : b.values()) v = val(rng);
    const Eigen::MatrixXd A = dense_2d(u, alpha, n, g.h);
    const Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.values().data(), 4 * n * n);
    const Eigen::VectorXd x = A.partialPivLu().solve(bv);
    const TensorField f = solve_H_2d(ups, alpha, b);
    const Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.values().data(), 4 * n * n);
    const double residual = (A * fv - bv).norm() / bv.norm();
    const double rel = (fv - x).norm() / x.norm();
    const double operator_diff = [&] {
      // The matrix-free operator applied to unit vectors reproduces the dense matrix.
      double worst = 0.0;
      TensorField e(g);
      for (int col = 0; col < 4 * n * n; ++col) {
        std::fill(e.values().begin(), e.values().end(), 0.0);
        e.values()[col] = 1.0;
        const TensorField he = apply_H(ups, alpha, e);
        for (int row = 0; row < 4 * n * n; ++row) worst = std::max(worst, std::abs(he.values()[row] - A(row, col)));
      }
      return worst;
    }();
    res.values["dense_2d_rel"] = rel;
    res.values["dense_2d_residual"] = residual;
    res.values["dense_2d_operator_diff"] = operator_diff;
    if (!(residual <= tol.dense_2d && rel <= tol.dense_2d && operator_diff <= 1e-9)) {
      failures.push_back("2D dense oracle");
    }
  }

  int spd_ok = 0;
  double worst_sym = 0.0;
  for (int trial = 0; trial < tol.spd_trials; ++trial) {
    const int dim = trial % 2 ? 2 : 1;
    const int n = dim == 1 ? 24 : 8;
    const Grid g = Grid::make(dim, n);
    ScalarField ups(g);
    for (double& v : ups.values()) v = coef(rng);
    const double a = std::pow(10.0, -4.0 + 3.0 * (trial % 7) / 6.0);
    TensorField f(g), k(g);
    for (double& v : f.values()) v = val(rng);
    for (double& v : k.values()) v = val(rng);
    const TensorField hf = apply_H(ups, a, f), hk = apply_H(ups, a, k);
    double fhk = 0.0, hfk = 0.0, fhf = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q) {
      fhk += f.values()[q] * hk.values()[q];
      hfk += hf.values()[q] * k.values()[q];
      fhf += f.values()[q] * hf.values()[q];
      scale += std::abs(f.values()[q] * hk.values()[q]);
    }
    const double sym = std::abs(fhk - hfk) / scale;
    worst_sym = std::max(worst_sym, sym);
    if (sym <= tol.symmetry && fhf > 0.0) ++spd_ok;
  }
  res.values["spd_trials_passed"] = spd_ok;
  res.values["worst_symmetry"] = worst_sym;
  if (spd_ok != tol.spd_trials) failures.push_back("SPD trials");

  res.passed = failures.empty();
  char buf[200];
  std::snprintf(buf, sizeof buf, "order %.3f (1D) %.3f (2D), dense %.1e/%.1e, SPD %d/%d", order_1d, order_2d,
                res.values["dense_1d_rel"].get<double>(), res.values["dense_2d_rel"].get<double>(), spd_ok,
                tol.spd_trials);
  res.detail = buf;
  for (const auto& f : failures) res.detail += "; failed: " + f;
  return res;
}

// ---------------------------------------------------------------- baselines

inline CriterionResult baselines(PresetCache& presets, const Tolerances& tol) {
  CriterionResult res;
  res.id = 3;
  res.name = "baseline pathologies";
  const PresetOutcome& burgers = presets.get("burgers-fig2");
  const PresetOutcome& euler = presets.get("euler-fig4");
  const RunRecord* lw_b = burgers.find("lw");
  const RunRecord* lw_e = euler.find("lw");
  const RunRecord* lf_e = euler.find("lf");

  const bool a = lw_b->max_tv_ratio > tol.lw_tv_growth;
  const bool b = lw_e->result.failure && lw_e->result.failure->time < euler.preset.t_end &&
                 (lw_e->result.failure->kind == Blowup::Kind::non_positive_density ||
                  lw_e->result.failure->kind == Blowup::Kind::non_finite);
  const int half = std::max(1, euler.preset.n / 100);
  const double lf_mag = shock_magnitude(lf_e->result.final.state, half);
  const double ref_mag = shock_magnitude(lf_e->reference->final.state, half);
  const bool c = lf_e->result.completed() && lf_mag < ref_mag;

  res.values["lw_burgers_max_tv_ratio"] = lw_b->max_tv_ratio;
  res.values["lw_burgers_reached"] = lw_b->result.final.t;
  res.values["lw_euler_failure_time"] = lw_e->result.failure ? lw_e->result.failure->time : -1.0;
  res.values["lf_shock_magnitude"] = lf_mag;
  res.values["reference_shock_magnitude"] = ref_mag;
  res.passed = a && b && c;
  char buf[256];
  std::snprintf(buf, sizeof buf, "(a) LW Burgers max TV ratio %.3g%s; (b) LW Euler %s at t=%.4f; (c) LF shock %.3f vs reference %.3f",
                lw_b->max_tv_ratio, lw_b->result.completed() ? "" : " before breakdown",
                lw_e->result.failure ? lw_e->result.failure->cause.c_str() : "completed",
                lw_e->result.final.t, lf_mag, ref_mag);
  res.detail = buf;
  return res;
}

// ---------------------------------------------------------------- regularity

inline CriterionResult regularity(PresetCache& presets, const Tolerances& tol) {
  CriterionResult res;
  res.id = 4;
  res.name = "IGR regularity";
  double worst = 0.0;
  int runs = 0;
  std::vector<std::string> failures;
  for (const char* name : {"burgers-fig2", "euler-fig4", "euler-sound-sweep", "euler-refinement", "euler-shock-speed", "euler2d-fig8"}) {
    for (const auto& r : presets.get(name).runs) {
      if (r.config.scheme != SchemeKind::LW_IGR && r.config.scheme != SchemeKind::MIXED_IGR) continue;
      ++runs;
      const std::string tag = std::string(name) + "/" + r.plan.label;
      if (!r.result.completed()) {
        failures.push_back(tag + " stopped: " + r.result.failure->cause);
        continue;
      }
      for (const auto& snap : r.result.snapshots) {
        try {
          check_state(snap.state);
        } catch (const Error& e) {
          failures.push_back(tag + ": " + e.what());
        }
      }
      for (double v : r.snapshot_tv_ratio) worst = std::max(worst, v);
      res.values["max_snapshot_tv_ratio"][tag] =
          r.snapshot_tv_ratio.empty() ? 0.0 : *std::max_element(r.snapshot_tv_ratio.begin(), r.snapshot_tv_ratio.end());
    }
  }
  if (worst > tol.igr_tv_growth) failures.push_back("TV growth");
  res.values["worst_tv_ratio"] = worst;
  res.passed = failures.empty();
  char buf[120];
  std::snprintf(buf, sizeof buf, "%d regularized runs, worst snapshot TV ratio %.4f", runs, worst);
  res.detail = buf;
  for (const auto& f : failures) res.detail += "; " + f;
  return res;
}

// ---------------------------------------------------------------- refinement

inline CriterionResult refinement(PresetCache& presets, const Tolerances& tol) {
  CriterionResult res;
  res.id = 5;
  res.name = "refinement";
  std::vector<double> errors;
  std::vector<int> ns;
  for (const auto& r : presets.get("euler-refinement").runs) {
    if (!r.result.completed() || !r.reference) {
      res.detail = r.plan.label + " did not complete";
      return res;
    }
    ns.push_back(r.plan.n);
    errors.push_back(error_norms(r.result.final.state, r.reference->final.state).u[0].l1);
  }
  bool decreasing = errors.size() >= 2;
  for (std::size_t k = 1; k < errors.size(); ++k) decreasing = decreasing && errors[k] < errors[k - 1];
  const double gain = errors.back() / errors.front();
  res.values["n"] = ns;
  res.values["l1_u_error"] = errors;
  res.values["finest_over_coarsest"] = gain;
  res.passed = decreasing && gain <= tol.refinement_gain;
  res.detail = "L1(u) errors";
  for (std::size_t k = 0; k < errors.size(); ++k) res.detail += " n=" + std::to_string(ns[k]) + ":" + format_number(std::round(errors[k] * 1e4) / 1e4);
  res.detail += ", finest/coarsest " + format_number(std::round(gain * 1e4) / 1e4);
  return res;
}

// ---------------------------------------------------------------- shock speed

inline CriterionResult shock_speed(PresetCache& presets, const Tolerances& tol) {
  CriterionResult res;
  res.id = 6;
  res.name = "shock speed";
  const PresetOutcome& out = presets.get("euler-shock-speed");
  const RunRecord& r = out.runs.front();
  if (!r.result.completed()) {
    res.detail = "run stopped: " + r.result.failure->cause;
    return res;
  }
  std::vector<double> t, x;
  for (const auto& snap : r.result.snapshots) {
    if (snap.t <= 0.0) continue;
    t.push_back(snap.t);
    x.push_back(shock_position(snap.state));
  }
  const double slope = regression_slope(t, x, out.preset.length);
  const double expected = 0.5 * (2.0 + 0.0);
  const double h = out.preset.h();
  const double band = tol.shock_cells * h / tol.shock_time_window;
  res.values["slope"] = slope;
  res.values["expected"] = expected;
  res.values["band"] = band;
  res.passed = std::abs(slope - expected) <= band;
  char buf[120];
  std::snprintf(buf, sizeof buf, "slope %.5f vs %.1f, band %.4f", slope, expected, band);
  res.detail = buf;
  return res;
}

// ---------------------------------------------------------------- pre-shock accuracy

inline CriterionResult preshock(const Tolerances& tol) {
  CriterionResult res;
  res.id = 7;
  res.name = "pre-shock order";
  const CharacteristicSolution sol([](double y) { return 5.0 * std::sin(2 * pi * y); },
                                   [](double y) { return 10.0 * pi * std::cos(2 * pi * y); }, tol.preshock_time);
  std::vector<double> hs, errs;
  for (int n : {64, 128, 256, 512}) {
    const Grid g = Grid::make(1, n);
    RunConfig rc;
    rc.scheme = SchemeKind::LW;
    rc.t_end = tol.preshock_time;
    rc.flux.kind = FluxKind::burgers1d;
    rc.flux.velocity_form = true;
    const RunResult r = advance(initial_state(InitialData::sine, g), rc);
    if (!r.completed()) {
      res.detail = "run stopped at n=" + std::to_string(n);
      return res;
    }
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      err = std::max(err, std::abs(r.final.state.mom(i, 0) - characteristics_eval(sol, g.center(i))));
    }
    hs.push_back(g.h);
    errs.push_back(err);
  }
  const double order = log_slope(hs, errs);
  res.values["linf_errors"] = errs;
  res.values["order"] = order;
  res.passed = within(order, tol.preshock_order, tol.preshock_order_band);
  char buf[120];
  std::snprintf(buf, sizeof buf, "L-infinity order %.3f (errors %.2e .. %.2e)", order, errs.front(), errs.back());
  res.detail = buf;
  return res;
}

// ---------------------------------------------------------------- 2D agreement

inline CriterionResult agreement_2d(PresetCache& presets, const Tolerances& tol) {
  CriterionResult res;
  res.id = 8;
  res.name = "2D agreement";
  const PresetOutcome& out = presets.get("euler2d-fig8");
  const RunRecord* two = out.find("igr");
  const RunRecord* one = out.find("igr_1d");
  for (const RunRecord* r : {two, one}) {
    if (!r->result.completed()) {
      res.detail = r->plan.label + " stopped: " + r->result.failure->cause;
      return res;
    }
  }
  auto masked = [&](const RunRecord& r) {
    const State& ref = r.reference->final.state;
    const auto mask = away_from_shocks(ref, tol.shock_band);
    return error_norms(r.result.final.state, ref, &mask).u[0].l1;
  };
  const double e2 = masked(*two), e1 = masked(*one);
  res.values["l1_u_2d"] = e2;
  res.values["l1_u_1d"] = e1;
  res.values["ratio"] = e2 / e1;
  res.passed = e2 <= tol.agreement_ratio * e1;
  char buf[140];
  std::snprintf(buf, sizeof buf, "masked L1(u) %.4f (2D, n=%d) vs %.4f (1D, n=%d), ratio %.3f", e2, two->plan.n, e1,
                one->plan.n, e2 / e1);
  res.detail = buf;
  return res;
}

// ---------------------------------------------------------------- geodesic

inline CriterionResult geodesic(PresetCache& presets, const Tolerances& tol) {
  CriterionResult res;
  res.id = 9;
  res.name = "geodesic demo";
  const PresetOutcome& out = presets.get("geodesic-fig3");
  const TrajectoryConfig base;
  bool feasible = true;
  double worst_line = 0.0;
  std::vector<double> alphas, gaps;
  const double t_half = 0.5 * merge_time(base.start, base.velocity);
  for (const auto& [alpha, rows] : out.trajectories) {
    PhasePoint p0 = base.start;
    p0.alpha = alpha;
    const DualPoint e0 = grad_psi(p0);
    const PhaseVelocity w = hessian_psi(p0, base.velocity);
    double gap = 0.0;
    for (const auto& row : rows) {
      if (!(row.dual.phi_prime > 0.0)) {
        feasible = false;
        continue;
      }
      const DualPoint e = grad_psi(row.dual);
      const double lb = e0.eta_bar + row.t * w.bar, lp = e0.eta_prime + row.t * w.prime;
      const double scale = std::max({1.0, std::abs(lb), std::abs(lp)});
      worst_line = std::max(worst_line, std::hypot(e.eta_bar - lb, e.eta_prime - lp) / scale);
      if (row.t <= t_half) gap = std::max(gap, std::abs(row.dual.phi_prime - row.euclid.phi_prime));
    }
    alphas.push_back(alpha);
    gaps.push_back(gap);
  }
  const double slope = log_slope(alphas, gaps);
  res.values["feasible"] = feasible;
  res.values["collinearity"] = worst_line;
  res.values["alpha"] = alphas;
  res.values["gap"] = gaps;
  res.values["slope"] = slope;
  res.passed = feasible && worst_line <= tol.collinearity && within(slope, tol.alpha_slope, tol.alpha_slope_band);
  char buf[160];
  std::snprintf(buf, sizeof buf, "feasible %s, collinearity %.1e, alpha slope %.3f", feasible ? "yes" : "no",
                worst_line, slope);
  res.detail = buf;
  return res;
}

}  // namespace acceptance

/// Runs the selected criteria; `on_result` sees each verdict as it is reached.
inline AcceptanceReport run_acceptance(const AcceptanceOptions& opt = {},
                                       const std::function<void(const CriterionResult&)>& on_result = {}) {
  using namespace acceptance;
  PresetCache presets(opt);
  const Tolerances& tol = opt.tol;
  static const char* names[] = {"conservation",         "elliptic",       "baseline pathologies",
                                "IGR regularity",       "refinement",     "shock speed",
                                "pre-shock order",      "2D agreement",   "geodesic demo"};
  const std::vector<std::pair<int, std::function<CriterionResult()>>> all = {
      {1, [&] { return conservation(presets, tol); }}, {2, [&] { return elliptic(tol); }},
      {3, [&] { return baselines(presets, tol); }},    {4, [&] { return regularity(presets, tol); }},
      {5, [&] { return refinement(presets, tol); }},   {6, [&] { return shock_speed(presets, tol); }},
      {7, [&] { return preshock(tol); }},              {8, [&] { return agreement_2d(presets, tol); }},
      {9, [&] { return geodesic(presets, tol); }}};
  AcceptanceReport report;
  for (const auto& [id, run] : all) {
    if (!opt.only.empty() && !opt.only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = names[id - 1];
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    report.criteria.push_back(std::move(r));
  }
  return report;
}

}  // namespace igr
