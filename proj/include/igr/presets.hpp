#pragma once

// Named experiment setups. A preset plus overrides fully determines every run
// it performs; all values end up in the metadata of the files it writes.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "igr/physics.hpp"
#include "igr/schemes.hpp"

namespace igr {

enum class AlphaScaling { quadratic, fixed };

inline const char* to_string(AlphaScaling s) { return s == AlphaScaling::quadratic ? "quadratic" : "fixed"; }

inline std::optional<AlphaScaling> alpha_scaling_from_string(const std::string& s) {
  if (s == "quadratic") return AlphaScaling::quadratic;
  if (s == "fixed") return AlphaScaling::fixed;
  return std::nullopt;
}

/// Initial data families.
enum class InitialData {
  sine,         // rho = 1, u = 5 sin(2 pi x)
  sine_2d,      // rho = 1, u = (5 sin(2 pi x) (1 + 0.1 cos(2 pi y)), 0)
  riemann_ramp  // rho = 1, u = 2 left of the front, 0 right of it, smooth ramp back to 2
};

inline const char* to_string(InitialData d) {
  switch (d) {
    case InitialData::sine: return "rho=1;u=5sin(2pi x)";
    case InitialData::sine_2d: return "rho=1;u=(5sin(2pi x)(1+0.1cos(2pi y)),0)";
    case InitialData::riemann_ramp: return "rho=1;u=2 on [0,0.8),0 on [0.8,1.6),1-cos(pi(x-1.6)/0.4) on [1.6,2)";
  }
  return "?";
}

struct ExperimentPreset {
  std::string name;
  FluxKind flux = FluxKind::euler1d;
  bool hold_density = false;  // burgers1d: evolve u alone with rho frozen at 1
  InitialData initial = InitialData::sine;
  double length = 1.0;

  int n = 200;
  int n_ref = 2000;  // 0: no fine reference
  double alpha = 0.0;  // at resolution n
  AlphaScaling alpha_scaling = AlphaScaling::quadratic;
  SchemeKind scheme = SchemeKind::LW_IGR;
  double a = 0.8;
  double gamma = 1.4;
  double cfl = 0.4;
  double t_end = 0.2;
  std::vector<double> snapshot_times;

  std::vector<double> sweep_a;       // sound-speed sweep values
  std::vector<int> levels;           // refinement multipliers of n
  std::vector<double> sweep_alpha;   // geodesic demo
  bool baselines = false;            // also run LF and unregularized LW at n
  int companion_1d = 0;              // 2D presets: 1D run at this resolution for comparison

  int dim() const { return flux == FluxKind::euler2d ? 2 : 1; }
  double h() const { return length / n; }

  /// Regularization strength at another resolution.
  double alpha_at(int m) const {
    if (alpha_scaling == AlphaScaling::fixed) return alpha;
    const double r = static_cast<double>(n) / m;
    return alpha * r * r;
  }

  FluxSpec flux_spec(double alpha_value, double a_value) const {
    FluxSpec f;
    f.kind = flux;
    f.alpha = alpha_value;
    if (flux != FluxKind::burgers1d) f.pressure = PressureLaw{a_value, gamma};
    f.velocity_form = hold_density;
    return f;
  }

  RunConfig run_config(SchemeKind kind, double alpha_value, double a_value) const {
    RunConfig rc;
    rc.scheme = kind;
    rc.cfl = cfl;
    rc.t_end = t_end;
    rc.flux = flux_spec(kind == SchemeKind::LF || kind == SchemeKind::LW ? 0.0 : alpha_value, a_value);
    rc.snapshot_times = snapshot_times;
    return rc;
  }

  void validate() const {
    if (n <= 0) throw std::invalid_argument("n must be positive");
    if (n_ref < 0) throw std::invalid_argument("n-ref must be non-negative");
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
    if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
    if (!(gamma >= 1.0)) throw std::invalid_argument("gamma must be at least 1");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
    if (!(t_end > 0.0)) throw std::invalid_argument("t-end must be positive");
    for (double t : snapshot_times) {
      if (!(t >= 0.0 && t <= t_end)) throw std::invalid_argument("snapshot time outside [0, t-end]");
    }
  }
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"burgers-fig2",     "euler-fig4",   "euler-sound-sweep",
                                                 "euler-refinement", "euler-shock-speed", "euler2d-fig8",
                                                 "geodesic-fig3"};
  return names;
}

/// Defaults for a named preset; nullopt for unknown names.
inline std::optional<ExperimentPreset> find_preset(const std::string& name) {
  ExperimentPreset p;
  p.name = name;
  if (name == "burgers-fig2") {
    p.flux = FluxKind::burgers1d;
    p.n = 200;
    p.n_ref = 0;
    p.alpha = 200.0 / (200.0 * 200.0);
    p.scheme = SchemeKind::MIXED_IGR;
    p.t_end = 2.0;
    p.snapshot_times = {0.05, 0.2, 2.0};
    p.baselines = true;
  } else if (name == "euler-fig4") {
    p.n = 200;
    p.n_ref = 2000;
    p.alpha = 20.0 / (200.0 * 200.0);
    p.snapshot_times = {0.05, 0.1, 0.2};
    p.baselines = true;
  } else if (name == "euler-sound-sweep") {
    p.n = 200;
    p.n_ref = 2000;
    p.alpha = 20.0 / (200.0 * 200.0);
    p.gamma = 1.0;
    p.sweep_a = {0.8, 0.6, 0.2, 0.12};
  } else if (name == "euler-refinement") {
    p.n = 100;
    p.n_ref = 16000;
    p.alpha = 20.0 / (100.0 * 100.0);
    p.levels = {1, 2, 4, 8};
  } else if (name == "euler-shock-speed") {
    p.flux = FluxKind::burgers1d;
    p.hold_density = true;
    p.initial = InitialData::riemann_ramp;
    p.length = 2.0;
    p.n = 400;
    p.n_ref = 0;
    p.alpha = 20.0 * (2.0 / 400) * (2.0 / 400);
    p.scheme = SchemeKind::MIXED_IGR;
    p.t_end = 0.4;
    for (int k = 10; k <= 40; ++k) p.snapshot_times.push_back(k / 100.0);
  } else if (name == "euler2d-fig8") {
    p.flux = FluxKind::euler2d;
    p.initial = InitialData::sine_2d;
    p.n = 128;
    p.n_ref = 512;
    p.alpha = 20.0 / (128.0 * 128.0);
    p.snapshot_times = {0.1, 0.2};
    p.companion_1d = 128;
  } else if (name == "geodesic-fig3") {
    p.flux = FluxKind::burgers1d;
    p.n = 301;  // trajectory samples
    p.n_ref = 0;
    p.alpha = 0.01;
    p.alpha_scaling = AlphaScaling::fixed;
    p.t_end = 3.0;
    p.sweep_alpha = {0.1, 0.01, 0.001};
  } else {
    return std::nullopt;
  }
  return p;
}

inline State initial_state(InitialData kind, const Grid& g) {
  constexpr double pi = std::numbers::pi;
  State s(g);
  const int rows = g.dim == 2 ? g.n : 1;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const std::size_t c = g.index(i, j);
      const double x = g.center(i);
      s.rho(c) = 1.0;
      switch (kind) {
        case InitialData::sine: s.mom(c, 0) = 5.0 * std::sin(2.0 * pi * x); break;
        case InitialData::sine_2d:
          s.mom(c, 0) = 5.0 * std::sin(2.0 * pi * x) * (1.0 + 0.1 * std::cos(2.0 * pi * g.center(j)));
          break;
        case InitialData::riemann_ramp: {
          const double xs = x / g.length * 2.0;
          double u = 0.0;
          if (xs < 0.8) u = 2.0;
          else if (xs >= 1.6) u = 1.0 - std::cos(pi * (xs - 1.6) / 0.4);
          s.mom(c, 0) = u;
          break;
        }
      }
    }
  }
  return s;
}

}  // namespace igr
