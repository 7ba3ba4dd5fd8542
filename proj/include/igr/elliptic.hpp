#pragma once

// Screened elliptic operator H_v f = v f - alpha D(v Div f) and its inverse.
//
// 1D: compact three-point conservative stencil with the coefficient averaged
// to half cells, v_{i+1/2} = (v_i + v_{i+1}) / 2, inverted exactly by a
// cyclic tridiagonal solve.
//
// 2D: tensor fields, Div row-wise. Grad(v Div F) is assembled term by term:
// second derivatives along one axis use the same compact face stencil as in
// 1D, mixed derivatives use centred differences. Since a centred difference
// is the mean of two face differences, the compact energy dominates the
// centred one and the operator stays SPD in the Frobenius product. Every
// Fourier mode the centred velocity gradient can excite is damped at full
// strength, and fields constant along y reduce exactly to the 1D operator.
// Inverted by matrix-free conjugate gradients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "igr/errors.hpp"
#include "igr/grid.hpp"

namespace igr {

struct EllipticOptions {
  double tol = 1e-10;   // relative residual
  int max_iter = 0;     // 0 selects 10 * n
  bool jacobi = true;   // diagonal preconditioner
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

inline void require_positive_coefficient(const ScalarField& upsilon) {
  for (std::size_t c = 0; c < upsilon.cells(); ++c) {
    if (!(upsilon(c) > 0.0)) throw NonPositiveDensity(c, upsilon(c));
  }
}

/// 1D compact operator on raw arrays.
inline void apply_H_line(const Grid& g, std::span<const double> ups, double alpha,
                         std::span<const double> f, std::span<double> out) {
  const int n = g.n;
  const double s = alpha / (g.h * g.h);
  for (int i = 0; i < n; ++i) {
    const int ip = i + 1 == n ? 0 : i + 1;
    const int im = i == 0 ? n - 1 : i - 1;
    const double up = 0.5 * (ups[i] + ups[ip]);
    const double um = 0.5 * (ups[i] + ups[im]);
    out[i] = ups[i] * f[i] - s * (up * (f[ip] - f[i]) - um * (f[i] - f[im]));
  }
}

/// 2D tensor operator on raw component-major arrays (4 components, xx xy yx yy).
/// Entry (r, c) of Grad(v Div F) expands to d_c(v d_c F_rc) + d_c(v d_k F_rk), k != c.
/// The direct term uses the compact face stencil with v averaged to faces, the
/// mixed term centred differences on both sides. `work` must hold 2 * cells doubles.
inline void apply_H_tensor(const Grid& g, std::span<const double> ups, double alpha,
                           std::span<const double> f, std::span<double> out, std::span<double> work) {
  const int n = g.n;
  const std::size_t N = g.cells();
  const double s = alpha / (g.h * g.h);
  std::span<double> flux(work.data(), N);
  std::span<double> mixed(work.data() + N, N);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const int k = 1 - c;
      const std::size_t rc = (2 * r + c) * N;
      const std::size_t rk = (2 * r + k) * N;
      detail::central_difference(g, f.subspan(rk, N), flux, k);
      for (std::size_t q = 0; q < N; ++q) flux[q] *= ups[q];
      detail::central_difference(g, flux, mixed, c);
      const double* fr = f.data() + rc;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const std::size_t q = static_cast<std::size_t>(j) * n + i;
          std::size_t qp, qm;
          if (c == 0) {
            qp = static_cast<std::size_t>(j) * n + (i + 1 == n ? 0 : i + 1);
            qm = static_cast<std::size_t>(j) * n + (i == 0 ? n - 1 : i - 1);
          } else {
            qp = static_cast<std::size_t>(j + 1 == n ? 0 : j + 1) * n + i;
            qm = static_cast<std::size_t>(j == 0 ? n - 1 : j - 1) * n + i;
          }
          const double up = 0.5 * (ups[q] + ups[qp]);
          const double um = 0.5 * (ups[q] + ups[qm]);
          const double direct = up * (fr[qp] - fr[q]) - um * (fr[q] - fr[qm]);
          out[rc + q] = ups[q] * fr[q] - s * direct - alpha * mixed[q];
        }
      }
    }
  }
}

/// Diagonal of the tensor operator, one entry per cell (same for all components).
inline std::vector<double> tensor_diagonal(const Grid& g, std::span<const double> ups, double alpha) {
  const double s = alpha / (g.h * g.h);
  std::vector<double> d(g.cells());
  for (std::size_t q = 0; q < g.cells(); ++q) {
    double faces = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      faces += ups[q] + 0.5 * (ups[g.neighbor(q, axis, 1)] + ups[g.neighbor(q, axis, -1)]);
    }
    d[q] = ups[q] + s * faces;  // the mixed term has no diagonal entry
  }
  return d;
}

}  // namespace detail

/// 1D operator H_v f.
inline ScalarField apply_H(const ScalarField& upsilon, double alpha, const ScalarField& f) {
  upsilon.require_same_shape(f);
  if (f.grid().dim != 1) throw ShapeMismatch("scalar H is defined on 1D grids");
  ScalarField out(f.grid());
  detail::apply_H_line(f.grid(), upsilon.component(0), alpha, f.component(0), out.component(0));
  return out;
}

/// Tensor operator H_v F = v F - alpha Grad(v Div F).
inline TensorField apply_H(const ScalarField& upsilon, double alpha, const TensorField& f) {
  if (!(upsilon.grid() == f.grid())) throw ShapeMismatch("coefficient and tensor grids differ");
  const Grid& g = f.grid();
  TensorField out(g);
  if (g.dim == 1) {
    detail::apply_H_line(g, upsilon.component(0), alpha, f.component(0), out.component(0));
    return out;
  }
  std::vector<double> work(2 * g.cells());
  detail::apply_H_tensor(g, upsilon.component(0), alpha, f.values(), out.values(), work);
  return out;
}

/// Exact inverse of the 1D operator via a cyclic tridiagonal solve
/// (Thomas algorithm with a Sherman-Morrison correction for the corners).
inline ScalarField solve_H_1d(const ScalarField& upsilon, double alpha, const ScalarField& rhs) {
  upsilon.require_same_shape(rhs);
  const Grid& g = rhs.grid();
  if (g.dim != 1) throw ShapeMismatch("solve_H_1d needs a 1D grid");
  detail::require_positive_coefficient(upsilon);
  const int n = g.n;
  const double s = alpha / (g.h * g.h);

  // Row i: lower[i] x_{i-1} + diag[i] x_i + upper[i] x_{i+1} = d_i, periodic.
  std::vector<double> lower(n), diag(n), upper(n);
  for (int i = 0; i < n; ++i) {
    const int ip = i + 1 == n ? 0 : i + 1;
    const int im = i == 0 ? n - 1 : i - 1;
    const double up = 0.5 * (upsilon(i) + upsilon(ip));
    const double um = 0.5 * (upsilon(i) + upsilon(im));
    lower[i] = -s * um;
    upper[i] = -s * up;
    diag[i] = upsilon(i) + s * (up + um);
  }

  ScalarField x(g);
  auto check_pivot = [](double p) {
    if (!std::isfinite(p) || std::abs(p) < 1e-300) throw SingularOperator("zero pivot in H solve");
  };

  if (n == 1) {
    const double a = diag[0] + lower[0] + upper[0];
    check_pivot(a);
    x(0) = rhs(0) / a;
    return x;
  }
  if (n == 2) {
    const double a00 = diag[0], a01 = lower[0] + upper[0];
    const double a10 = lower[1] + upper[1], a11 = diag[1];
    const double det = a00 * a11 - a01 * a10;
    check_pivot(det);
    x(0) = (rhs(0) * a11 - a01 * rhs(1)) / det;
    x(1) = (a00 * rhs(1) - a10 * rhs(0)) / det;
    return x;
  }

  const double beta = lower[0];       // row 0, column n-1
  const double alpha_c = upper[n - 1];  // row n-1, column 0
  const double gamma = -diag[0];

  std::vector<double> b(diag);
  b[0] -= gamma;
  b[n - 1] -= alpha_c * beta / gamma;

  // Thomas factorisation shared by both right-hand sides.
  std::vector<double> cp(n), inv_pivot(n);
  check_pivot(b[0]);
  inv_pivot[0] = 1.0 / b[0];
  cp[0] = upper[0] * inv_pivot[0];
  for (int i = 1; i < n; ++i) {
    const double p = b[i] - lower[i] * cp[i - 1];
    check_pivot(p);
    inv_pivot[i] = 1.0 / p;
    cp[i] = upper[i] * inv_pivot[i];
  }
  auto thomas = [&](std::vector<double>& d) {
    d[0] *= inv_pivot[0];
    for (int i = 1; i < n; ++i) d[i] = (d[i] - lower[i] * d[i - 1]) * inv_pivot[i];
    for (int i = n - 2; i >= 0; --i) d[i] -= cp[i] * d[i + 1];
  };

  std::vector<double> y(rhs.component(0).begin(), rhs.component(0).end());
  thomas(y);
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = alpha_c;
  thomas(z);

  const double denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
  check_pivot(denom);
  const double fact = (y[0] + beta * y[n - 1] / gamma) / denom;
  for (int i = 0; i < n; ++i) x(i) = y[i] - fact * z[i];
  return x;
}

/// Conjugate-gradient inverse of the tensor operator. Starts from `guess`
/// when given; returns the first iterate whose relative residual is <= tol.
inline TensorField solve_H_2d(const ScalarField& upsilon, double alpha, const TensorField& rhs,
                              const EllipticOptions& opts = {}, const TensorField* guess = nullptr,
                              SolveReport* report = nullptr) {
  if (!(upsilon.grid() == rhs.grid())) throw ShapeMismatch("coefficient and rhs grids differ");
  if (guess && !(guess->grid() == rhs.grid())) throw ShapeMismatch("initial guess grid differs");
  detail::require_positive_coefficient(upsilon);
  const Grid& g = rhs.grid();
  const std::size_t m = rhs.size();
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * g.n;
  const auto ups = upsilon.component(0);

  std::vector<double> work, diagonal;
  if (g.dim == 2) work.resize(2 * g.cells());
  if (opts.jacobi) {
    if (g.dim == 2) {
      diagonal = detail::tensor_diagonal(g, ups, alpha);
    } else {
      diagonal.resize(g.cells());
      const double s = alpha / (g.h * g.h);
      for (std::size_t q = 0; q < g.cells(); ++q) {
        diagonal[q] = ups[q] + s * (ups[q] + 0.5 * (ups[g.neighbor(q, 0, 1)] + ups[g.neighbor(q, 0, -1)]));
      }
    }
  }
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    if (g.dim == 1) {
      detail::apply_H_line(g, ups, alpha, in, out);
    } else {
      detail::apply_H_tensor(g, ups, alpha, in, out, work);
    }
  };
  auto dot = [m](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += a[k] * b[k];
    return s;
  };
  const std::size_t cells = g.cells();
  auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
    if (!opts.jacobi) {
      z = r;
      return;
    }
    for (std::size_t k = 0; k < m; ++k) z[k] = r[k] / diagonal[k % cells];
  };

  TensorField x = guess ? *guess : TensorField(g);
  const auto b = rhs.values();
  std::vector<double> r(m), z(m), p(m), q(m);
  std::vector<double> bv(b.begin(), b.end());
  const double bnorm = std::sqrt(dot(bv, bv));
  if (bnorm == 0.0) {
    if (report) *report = {0, 0.0};
    return TensorField(g);
  }

  apply(x.values(), r);
  for (std::size_t k = 0; k < m; ++k) r[k] = b[k] - r[k];
  double rnorm = std::sqrt(dot(r, r));
  int it = 0;
  if (rnorm / bnorm > opts.tol) {
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    auto xv = x.values();
    while (true) {
      if (it >= max_iter) {
        if (report) *report = {it, rnorm / bnorm};
        throw NoConvergence(it, rnorm / bnorm);
      }
      apply(p, q);
      const double pq = dot(p, q);
      if (!(pq > 0.0)) throw SingularOperator("operator lost positive definiteness");
      const double step = rz / pq;
      for (std::size_t k = 0; k < m; ++k) {
        xv[k] += step * p[k];
        r[k] -= step * q[k];
      }
      ++it;
      rnorm = std::sqrt(dot(r, r));
      if (!std::isfinite(rnorm)) throw NoConvergence(it, rnorm);
      if (rnorm / bnorm <= opts.tol) break;
      precondition(r, z);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t k = 0; k < m; ++k) p[k] = z[k] + beta * p[k];
    }
  }
  if (report) *report = {it, rnorm / bnorm};
  return x;
}

}  // namespace igr
