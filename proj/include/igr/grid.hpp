#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "igr/errors.hpp"

namespace igr {

/// Uniform periodic Cartesian mesh on [0, length)^dim with n cells per axis.
///
/// Cells are stored x-fastest: cell (i, j) lives at flat index j * n + i.
/// Cell centers sit at (i + 1/2) h.
struct Grid {
  int dim = 1;
  int n = 1;
  double length = 1.0;
  double h = 1.0;

  static Grid make(int dim, int n, double length = 1.0) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
    if (n <= 0) throw std::invalid_argument("grid needs at least one cell per axis");
    if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
    // The only place the spacing is computed.
    return Grid{dim, n, length, length / n};
  }

  std::size_t cells() const {
    return dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  }

  /// Cell volume h^dim.
  double cell_volume() const { return dim == 1 ? h : h * h; }

  double center(int i) const { return (i + 0.5) * h; }

  int wrap(int i) const {
    const int r = i % n;
    return r < 0 ? r + n : r;
  }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(wrap(j)) * (dim == 2 ? n : 0) + wrap(i);
  }

  int i_of(std::size_t cell) const { return static_cast<int>(cell % n); }
  int j_of(std::size_t cell) const { return dim == 2 ? static_cast<int>(cell / n) : 0; }

  /// Periodic neighbor of `cell` shifted by `offset` cells along `axis`.
  std::size_t neighbor(std::size_t cell, int axis, int offset) const {
    const int i = i_of(cell);
    const int j = j_of(cell);
    return axis == 0 ? index(i + offset, j) : index(i, j + offset);
  }

  bool operator==(const Grid& other) const = default;
};

/// A field of rank 0 (scalar), 1 (vector) or 2 (tensor) on a grid.
///
/// Storage is component-major: all cells of component 0, then component 1, ...
/// Tensor component (r, c) has index r * dim + c and means d(.)_r / dx_c for
/// gradients, flux of quantity r in direction c for fluxes.
template <int Rank>
class Field {
  static_assert(Rank >= 0 && Rank <= 2);

 public:
  Field() = default;

  explicit Field(const Grid& grid, double fill = 0.0)
      : grid_(grid), values_(grid.cells() * count_components(grid.dim), fill) {}

  static int count_components(int dim) {
    int c = 1;
    for (int k = 0; k < Rank; ++k) c *= dim;
    return c;
  }

  static constexpr int rank() { return Rank; }

  const Grid& grid() const { return grid_; }
  int components() const { return count_components(grid_.dim); }
  std::size_t cells() const { return grid_.cells(); }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t cell, int comp = 0) { return values_[comp * cells() + cell]; }
  double operator()(std::size_t cell, int comp = 0) const { return values_[comp * cells() + cell]; }

  /// Tensor entry (r, c) of a cell.
  double& at(std::size_t cell, int r, int c) { return (*this)(cell, r * grid_.dim + c); }
  double at(std::size_t cell, int r, int c) const { return (*this)(cell, r * grid_.dim + c); }

  std::span<double> component(int comp) { return {values_.data() + comp * cells(), cells()}; }
  std::span<const double> component(int comp) const {
    return {values_.data() + comp * cells(), cells()};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const Field& other) const { return grid_ == other.grid_; }

  Field& operator+=(const Field& other) {
    require_same_shape(other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
  }
  Field& operator-=(const Field& other) {
    require_same_shape(other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  void require_same_shape(const Field& other) const {
    if (!same_shape(other)) throw ShapeMismatch("fields live on different grids");
  }

 private:
  Grid grid_{};
  std::vector<double> values_;
};

using ScalarField = Field<0>;
using VectorField = Field<1>;
using TensorField = Field<2>;

/// Conserved variables: density and momentum density.
struct State {
  ScalarField rho;
  VectorField mom;

  State() = default;
  explicit State(const Grid& grid) : rho(grid, 0.0), mom(grid, 0.0) {}

  const Grid& grid() const { return rho.grid(); }
};

/// Throws NonFiniteValue on the first NaN/Inf entry.
template <int Rank>
void check_finite(const Field<Rank>& f) {
  const auto v = f.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) throw NonFiniteValue(k);
  }
}

inline void check_positive(const ScalarField& rho) {
  for (std::size_t c = 0; c < rho.cells(); ++c) {
    if (!(rho(c) > 0.0)) throw NonPositiveDensity(c, rho(c));
  }
}

/// Throws if the density is not strictly positive or anything is non-finite.
inline void check_state(const State& s) {
  check_finite(s.rho);
  check_finite(s.mom);
  check_positive(s.rho);
}

/// Grid-weighted L2 inner product, sum over cells and components of a*b*h^d.
template <int Rank>
double inner(const Field<Rank>& a, const Field<Rank>& b) {
  a.require_same_shape(b);
  const auto va = a.values();
  const auto vb = b.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) sum += va[k] * vb[k];
  return sum * a.grid().cell_volume();
}

/// Integral of one component: sum of f * h^d.
template <int Rank>
double integral(const Field<Rank>& f, int comp = 0) {
  double sum = 0.0;
  for (double v : f.component(comp)) sum += v;
  return sum * f.grid().cell_volume();
}

namespace detail {

/// out[cell] = (in[cell + e_axis] - in[cell - e_axis]) / (2h)
inline void central_difference(const Grid& g, std::span<const double> in, std::span<double> out,
                               int axis) {
  const int n = g.n;
  const double inv2h = 1.0 / (2.0 * g.h);
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) {
      const int ip = i + 1 == n ? 0 : i + 1;
      const int im = i == 0 ? n - 1 : i - 1;
      out[i] = (in[ip] - in[im]) * inv2h;
    }
    return;
  }
  for (int j = 0; j < n; ++j) {
    const int jp = j + 1 == n ? 0 : j + 1;
    const int jm = j == 0 ? n - 1 : j - 1;
    for (int i = 0; i < n; ++i) {
      const int ip = i + 1 == n ? 0 : i + 1;
      const int im = i == 0 ? n - 1 : i - 1;
      const std::size_t c = static_cast<std::size_t>(j) * n + i;
      if (axis == 0) {
        out[c] = (in[static_cast<std::size_t>(j) * n + ip] - in[static_cast<std::size_t>(j) * n + im]) *
                 inv2h;
      } else {
        out[c] = (in[static_cast<std::size_t>(jp) * n + i] - in[static_cast<std::size_t>(jm) * n + i]) *
                 inv2h;
      }
    }
  }
}

}  // namespace detail

/// Centered second-order gradient of a scalar field.
inline VectorField central_gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  for (int axis = 0; axis < g.dim; ++axis) {
    detail::central_difference(g, f.component(0), out.component(axis), axis);
  }
  return out;
}

/// Centered Jacobian of a vector field: entry (r, c) = du_r / dx_c.
inline TensorField central_gradient(const VectorField& u) {
  const Grid& g = u.grid();
  TensorField out(g);
  for (int r = 0; r < g.dim; ++r) {
    for (int c = 0; c < g.dim; ++c) {
      detail::central_difference(g, u.component(r), out.component(r * g.dim + c), c);
    }
  }
  return out;
}

/// Centered divergence of a vector field.
inline ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(g);
  std::vector<double> tmp(g.cells());
  for (int c = 0; c < g.dim; ++c) {
    detail::central_difference(g, v.component(c), tmp, c);
    auto o = out.component(0);
    for (std::size_t k = 0; k < tmp.size(); ++k) o[k] += tmp[k];
  }
  return out;
}

/// Row-wise centered divergence of a tensor field: component r = sum_c dF_rc / dx_c.
inline VectorField divergence(const TensorField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  std::vector<double> tmp(g.cells());
  for (int r = 0; r < g.dim; ++r) {
    auto o = out.component(r);
    for (int c = 0; c < g.dim; ++c) {
      detail::central_difference(g, f.component(r * g.dim + c), tmp, c);
      for (std::size_t k = 0; k < tmp.size(); ++k) o[k] += tmp[k];
    }
  }
  return out;
}

/// u = m / rho. Throws NonPositiveDensity when rho <= 0 anywhere.
inline VectorField velocity(const State& s) {
  check_positive(s.rho);
  if (!(s.rho.grid() == s.mom.grid())) throw ShapeMismatch("density and momentum grids differ");
  VectorField u(s.grid());
  for (int r = 0; r < s.grid().dim; ++r) {
    for (std::size_t c = 0; c < s.rho.cells(); ++c) u(c, r) = s.mom(c, r) / s.rho(c);
  }
  return u;
}

/// Total variation sum |q_{i+1} - q_i| along x (periodic), summed over rows in 2D.
inline double total_variation(std::span<const double> q, const Grid& g) {
  double tv = 0.0;
  const int rows = g.dim == 2 ? g.n : 1;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const int ip = i + 1 == g.n ? 0 : i + 1;
      const std::size_t row = static_cast<std::size_t>(j) * g.n;
      tv += std::abs(q[row + ip] - q[row + i]);
    }
  }
  return tv;
}

}  // namespace igr
