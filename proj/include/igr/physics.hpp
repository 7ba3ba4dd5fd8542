#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "igr/elliptic.hpp"
#include "igr/errors.hpp"
#include "igr/grid.hpp"

namespace igr {

/// Barotropic pressure P(rho) = a rho^gamma.
struct PressureLaw {
  double a = 1.0;
  double gamma = 1.4;
};

inline double pressure(const PressureLaw& law, double rho) {
  if (!(rho > 0.0)) throw NonPositiveDensity(0, rho);
  return law.gamma == 1.0 ? law.a * rho : law.a * std::pow(rho, law.gamma);
}

/// sqrt(P'(rho)).
inline double sound_speed(const PressureLaw& law, double rho) {
  if (!(rho > 0.0)) throw NonPositiveDensity(0, rho);
  const double dp = law.gamma == 1.0 ? law.a : law.gamma * law.a * std::pow(rho, law.gamma - 1.0);
  return std::sqrt(dp);
}

enum class FluxKind { burgers1d, euler1d, euler2d };

inline const char* to_string(FluxKind k) {
  switch (k) {
    case FluxKind::burgers1d: return "burgers1d";
    case FluxKind::euler1d: return "euler1d";
    case FluxKind::euler2d: return "euler2d";
  }
  return "?";
}

struct FluxSpec {
  FluxKind kind = FluxKind::burgers1d;
  std::optional<PressureLaw> pressure;  // absent for burgers1d
  double alpha = 0.0;
  // burgers1d only: evolve u with flux u^2/2 and hold the density at its
  // initial value.
  bool velocity_form = false;

  int dim() const { return kind == FluxKind::euler2d ? 2 : 1; }

  void validate() const {
    if (kind == FluxKind::burgers1d && pressure) {
      throw std::invalid_argument("burgers1d carries no pressure law");
    }
    if (kind != FluxKind::burgers1d && !pressure) {
      throw std::invalid_argument(std::string(to_string(kind)) + " needs a pressure law");
    }
    if (pressure && (!(pressure->a > 0.0) || !(pressure->gamma >= 1.0))) {
      throw std::invalid_argument("pressure law needs a > 0 and gamma >= 1");
    }
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
    if (velocity_form && kind != FluxKind::burgers1d) {
      throw std::invalid_argument("velocity form exists only for burgers1d");
    }
  }
};

/// Previous elliptic solution reused as the starting guess of the next solve,
/// plus the iteration count of the latest solve.
struct CorrectionCache {
  TensorField last;
  bool valid = false;
  SolveReport report;
};

/// 1D flux correction 2 alpha Sigma, where Sigma solves
/// H_{1/rho} Sigma = (du/dx)^2 with the centred velocity derivative.
inline ScalarField igr_correction_1d(const State& s, double alpha) {
  const Grid& g = s.grid();
  if (g.dim != 1) throw ShapeMismatch("igr_correction_1d needs a 1D state");
  if (alpha == 0.0) return ScalarField(g);
  const TensorField du = central_gradient(velocity(s));
  ScalarField rhs(g), ups(g);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    rhs(c) = du(c, 0) * du(c, 0);
    ups(c) = 1.0 / s.rho(c);
  }
  ScalarField sigma = solve_H_1d(ups, alpha, rhs);
  sigma *= 2.0 * alpha;
  return sigma;
}

/// Multi-dimensional correction F solving
/// F / rho - alpha D(Div F / rho) = 2 alpha [Du][Du].
inline TensorField igr_correction_2d(const State& s, double alpha, const EllipticOptions& opts = {},
                                     CorrectionCache* cache = nullptr) {
  const Grid& g = s.grid();
  if (alpha == 0.0) return TensorField(g);
  const TensorField jac = central_gradient(velocity(s));
  const int d = g.dim;
  TensorField rhs(g);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    for (int r = 0; r < d; ++r) {
      for (int k = 0; k < d; ++k) {
        double sum = 0.0;
        for (int l = 0; l < d; ++l) sum += jac.at(c, r, l) * jac.at(c, l, k);
        rhs.at(c, r, k) = 2.0 * alpha * sum;
      }
    }
  }
  ScalarField ups(g);
  for (std::size_t c = 0; c < g.cells(); ++c) ups(c) = 1.0 / s.rho(c);

  const TensorField* guess = (cache && cache->valid && cache->last.grid() == g) ? &cache->last : nullptr;
  SolveReport report;
  TensorField f = solve_H_2d(ups, alpha, rhs, opts, guess, &report);
  if (cache) {
    cache->last = f;
    cache->valid = true;
    cache->report = report;
  }
  return f;
}

/// Mass flux rho u and momentum flux rho u (x) u + P Id + F.
struct Flux {
  VectorField mass;
  TensorField momentum;  // entry (r, c): flux of m_r along x_c
};

inline Flux total_flux(const FluxSpec& spec, const State& s, const EllipticOptions& opts = {},
                       CorrectionCache* cache = nullptr) {
  const Grid& g = s.grid();
  const int d = g.dim;
  if (d != spec.dim()) throw ShapeMismatch("flux kind does not match grid dimension");
  const VectorField u = velocity(s);
  Flux out{VectorField(g), TensorField(g)};
  if (spec.velocity_form) {
    for (std::size_t c = 0; c < g.cells(); ++c) out.momentum(c, 0) = 0.5 * s.mom(c, 0) * u(c, 0);
    if (spec.alpha > 0.0) {
      const ScalarField corr = igr_correction_1d(s, spec.alpha);
      for (std::size_t c = 0; c < g.cells(); ++c) out.momentum(c, 0) += corr(c);
    }
    return out;
  }
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const double p = spec.pressure ? pressure(*spec.pressure, s.rho(c)) : 0.0;
    for (int r = 0; r < d; ++r) {
      out.mass(c, r) = s.mom(c, r);
      for (int k = 0; k < d; ++k) {
        out.momentum.at(c, r, k) = s.mom(c, r) * u(c, k) + (r == k ? p : 0.0);
      }
    }
  }
  if (spec.alpha > 0.0) {
    if (d == 1) {
      const ScalarField corr = igr_correction_1d(s, spec.alpha);
      for (std::size_t c = 0; c < g.cells(); ++c) out.momentum(c, 0) += corr(c);
      if (cache) cache->report = {0, 0.0};
    } else {
      out.momentum += igr_correction_2d(s, spec.alpha, opts, cache);
    }
  }
  return out;
}

}  // namespace igr
