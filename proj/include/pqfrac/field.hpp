/// @file field.hpp
/// @brief Scalar, vector and matrix fields over a Grid, with the discrete
///        calculus used everywhere else: gradient, Hessian, divergence,
///        quadrature and boundary integration.
///
/// Derivatives are collocated at the nodes. Along each axis a node with both
/// neighbours present uses the centred second-order stencil; otherwise the
/// one-sided second-order stencil pointing into the domain is used (3 points
/// for first derivatives, 4 points for second derivatives).
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "pqfrac/error.hpp"
#include "pqfrac/grid.hpp"
#include "pqfrac/numeric.hpp"

namespace pqfrac {

/// Row-major 2x2 matrix; in 1D only entry 0 is used.
using Mat2 = std::array<double, 4>;

template <typename Value>
struct BasicField {
  GridPtr grid;
  std::vector<Value> values;

  BasicField() = default;
  explicit BasicField(GridPtr g) : grid(std::move(g)), values(grid->size(), Value{}) {}
  BasicField(GridPtr g, std::vector<Value> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->size()) throw Error("field size does not match grid");
  }

  std::size_t size() const noexcept { return values.size(); }
  Value& operator[](std::size_t k) noexcept { return values[k]; }
  const Value& operator[](std::size_t k) const noexcept { return values[k]; }
};

using ScalarField = BasicField<double>;
using VectorField = BasicField<Vec2>;
using MatrixField = BasicField<Mat2>;

inline double norm2(const Vec2& v) noexcept { return v[0] * v[0] + v[1] * v[1]; }
inline double dot(const Vec2& a, const Vec2& b) noexcept { return a[0] * b[0] + a[1] * b[1]; }
inline double frobenius2(const Mat2& m) noexcept {
  return m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
}
/// m * v for row-major m.
inline Vec2 matvec(const Mat2& m, const Vec2& v) noexcept {
  return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
}

/// Builds a scalar field by evaluating fn(x) at every active node.
inline ScalarField sample(const GridPtr& g, const std::function<double(const Vec2&)>& fn) {
  ScalarField f(g);
  for (std::size_t k = 0; k < g->size(); ++k)
    if (g->active(k)) f[k] = fn(g->coord(k));
  return f;
}

namespace detail {

inline void require_resolution(const Grid& g) {
  for (int a = 0; a < g.dim(); ++a)
    if (g.n(a) < 4) throw DegenerateGrid("derivatives need at least 4 nodes per axis");
}

/// d/dx_axis of a nodal array at node k.
inline double d1(const Grid& g, const std::vector<double>& u, std::size_t k, int axis) {
  const int di = axis == 0 ? 1 : 0, dj = axis == 1 ? 1 : 0;
  const double h = g.h(axis);
  const long m1 = g.neighbor(k, -di, -dj), p1 = g.neighbor(k, di, dj);
  if (m1 >= 0 && p1 >= 0) return (u[p1] - u[m1]) / (2 * h);
  if (p1 >= 0) {
    const long p2 = g.neighbor(k, 2 * di, 2 * dj);
    if (p2 >= 0) return (-3 * u[k] + 4 * u[p1] - u[p2]) / (2 * h);
    return (u[p1] - u[k]) / h;
  }
  if (m1 >= 0) {
    const long m2 = g.neighbor(k, -2 * di, -2 * dj);
    if (m2 >= 0) return (3 * u[k] - 4 * u[m1] + u[m2]) / (2 * h);
    return (u[k] - u[m1]) / h;
  }
  return 0.0;
}

/// d^2/dx_axis^2 of a nodal array at node k.
inline double d2(const Grid& g, const std::vector<double>& u, std::size_t k, int axis) {
  const int di = axis == 0 ? 1 : 0, dj = axis == 1 ? 1 : 0;
  const double h2 = g.h(axis) * g.h(axis);
  const long m1 = g.neighbor(k, -di, -dj), p1 = g.neighbor(k, di, dj);
  if (m1 >= 0 && p1 >= 0) return (u[p1] - 2 * u[k] + u[m1]) / h2;
  for (int sgn : {1, -1}) {
    const long a = g.neighbor(k, sgn * di, sgn * dj);
    if (a < 0) continue;
    const long b = g.neighbor(k, 2 * sgn * di, 2 * sgn * dj);
    if (b < 0) return 0.0;
    const long c = g.neighbor(k, 3 * sgn * di, 3 * sgn * dj);
    if (c >= 0) return (2 * u[k] - 5 * u[a] + 4 * u[b] - u[c]) / h2;
    return (u[k] - 2 * u[a] + u[b]) / h2;
  }
  return 0.0;
}

template <typename Value>
void require_finite(const BasicField<Value>& f) {
  const Grid& g = *f.grid;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!g.active(k)) continue;
    if constexpr (std::is_same_v<Value, double>) {
      if (!std::isfinite(f[k])) throw NonFiniteField("non-finite value in field");
    } else {
      for (double c : f[k])
        if (!std::isfinite(c)) throw NonFiniteField("non-finite value in field");
    }
  }
}

}  // namespace detail

inline VectorField gradient(const ScalarField& u) {
  const Grid& g = *u.grid;
  detail::require_resolution(g);
  VectorField out(u.grid);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.active(k)) continue;
    for (int a = 0; a < g.dim(); ++a) out[k][a] = detail::d1(g, u.values, k, a);
  }
  return out;
}

/// Hessian with the mixed derivative taken as the average of d_x(d_y u) and
/// d_y(d_x u), so the result is symmetric.
inline MatrixField hessian(const ScalarField& u) {
  const Grid& g = *u.grid;
  detail::require_resolution(g);
  MatrixField out(u.grid);
  std::vector<double> ux, uy;
  if (g.dim() == 2) {
    ux.assign(g.size(), 0.0);
    uy.assign(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!g.active(k)) continue;
      ux[k] = detail::d1(g, u.values, k, 0);
      uy[k] = detail::d1(g, u.values, k, 1);
    }
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.active(k)) continue;
    Mat2 m{detail::d2(g, u.values, k, 0), 0.0, 0.0, 0.0};
    if (g.dim() == 2) {
      const double mixed = 0.5 * (detail::d1(g, ux, k, 1) + detail::d1(g, uy, k, 0));
      m[1] = m[2] = mixed;
      m[3] = detail::d2(g, u.values, k, 1);
    }
    out[k] = m;
  }
  return out;
}

/// Jacobian of a vector field: entry (j, i) holds d v_j / d x_i.
inline MatrixField jacobian(const VectorField& v) {
  const Grid& g = *v.grid;
  detail::require_resolution(g);
  MatrixField out(v.grid);
  std::vector<double> comp(g.size());
  for (int j = 0; j < g.dim(); ++j) {
    for (std::size_t k = 0; k < g.size(); ++k) comp[k] = v[k][j];
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!g.active(k)) continue;
      for (int i = 0; i < g.dim(); ++i) out[k][2 * j + i] = detail::d1(g, comp, k, i);
    }
  }
  return out;
}

inline ScalarField divergence(const VectorField& v) {
  const Grid& g = *v.grid;
  detail::require_resolution(g);
  ScalarField out(v.grid);
  std::vector<double> comp(g.size());
  for (int a = 0; a < g.dim(); ++a) {
    for (std::size_t k = 0; k < g.size(); ++k) comp[k] = v[k][a];
    for (std::size_t k = 0; k < g.size(); ++k)
      if (g.active(k)) out[k] += detail::d1(g, comp, k, a);
  }
  return out;
}

/// Composite trapezoidal rule (cut-cell weights on the disc).
inline double integrate(const ScalarField& f) {
  detail::require_finite(f);
  const Grid& g = *f.grid;
  std::vector<double> terms(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) terms[k] = g.active(k) ? g.weight(k) * f[k] : 0.0;
  return pairwise_sum(terms);
}

/// Boundary integral of nodal values. Values off the boundary are ignored.
/// With exclude_corners the rectangle's corner nodes get zero weight.
inline double boundary_integrate(const ScalarField& f, bool exclude_corners = false) {
  const Grid& g = *f.grid;
  std::vector<double> terms;
  terms.reserve(g.boundary_nodes().size());
  for (std::size_t k : g.boundary_nodes()) {
    if (exclude_corners && g.is_corner(k)) continue;
    if (!std::isfinite(f[k])) throw NonFiniteField("non-finite boundary value");
    terms.push_back(g.boundary_weight(k) * f[k]);
  }
  return pairwise_sum(terms);
}

/// Writes one row per active node: header `x,value` or `x,y,value`.
inline void write_csv(std::ostream& os, const ScalarField& f) {
  const Grid& g = *f.grid;
  os << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
  char buf[96];
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.active(k)) continue;
    const Vec2 x = g.coord(k);
    if (g.dim() == 1)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x[0], f[k]);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x[0], x[1], f[k]);
    os << buf;
  }
}

}  // namespace pqfrac
