/// @file discrete_energy.hpp
/// @brief Compact discretization of the regularized energy minimized by the
///        Newton solver.
///
/// The energy is assembled from piecewise-linear elements: the cells of the
/// interval in 1D, and in 2D the four right triangles at the corners of every
/// cell (the union of both diagonal triangulations, each with weight 1/2).
/// This gives an exactly symmetric positive definite Hessian with a compact
/// stencil. The load is lumped with the grid's quadrature weights.
#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pqfrac/field.hpp"
#include "pqfrac/operator.hpp"

namespace pqfrac {

class DiscreteEnergy {
 public:
  /// One element: gradient g = ((u[a]-u[c]) * sx, (u[b]-u[c]) * sy).
  struct Element {
    std::size_t c, a, b;
    double sx, sy;
    double area;
  };

  DiscreteEnergy(GridPtr grid, const ProblemParams& pp) : grid_(std::move(grid)), pp_(pp), D_(pp) {
    const Grid& g = *grid_;
    free_.assign(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) free_[k] = g.node_kind(k) == NodeKind::Interior ? 1 : 0;
    if (g.dim() == 1) {
      for (int i = 0; i + 1 < g.n(); ++i)
        elements_.push_back({g.index(i), g.index(i + 1), g.index(i), 1.0 / g.h(), 0.0, g.h()});
      return;
    }
    const double hx = g.h(0), hy = g.h(1), quarter = 0.25 * hx * hy;
    for (int j = 0; j + 1 < g.n(1); ++j) {
      for (int i = 0; i + 1 < g.n(0); ++i) {
        // corner node, x-neighbour, y-neighbour, orientation
        const int corners[4][4] = {{0, 0, 1, 1}, {1, 0, -1, 1}, {0, 1, 1, -1}, {1, 1, -1, -1}};
        for (const auto& cn : corners) {
          const std::size_t c = g.index(i + cn[0], j + cn[1]);
          const std::size_t a = g.index(i + cn[0] + cn[2], j + cn[1]);
          const std::size_t b = g.index(i + cn[0], j + cn[1] + cn[3]);
          if (!g.active(c) || !g.active(a) || !g.active(b)) continue;
          elements_.push_back({c, a, b, cn[2] / hx, cn[3] / hy, quarter});
        }
      }
    }
  }

  const Grid& grid() const noexcept { return *grid_; }
  const ProblemParams& params() const noexcept { return pp_; }
  bool is_free(std::size_t k) const noexcept { return free_[k] != 0; }
  const std::vector<Element>& elements() const noexcept { return elements_; }

  Vec2 element_gradient(const Element& e, std::span<const double> u) const noexcept {
    return {(u[e.a] - u[e.c]) * e.sx, e.sy != 0.0 ? (u[e.b] - u[e.c]) * e.sy : 0.0};
  }

  double value(std::span<const double> u, std::span<const double> f) const {
    std::vector<double> terms(elements_.size() + u.size(), 0.0);
    for (std::size_t m = 0; m < elements_.size(); ++m) {
      const Element& e = elements_[m];
      const double g2 = norm2(element_gradient(e, u));
      detail::check_gradient(g2, pp_.q);
      terms[m] = e.area * D_.density(g2 + pp_.eps);
    }
    for (std::size_t k = 0; k < u.size(); ++k) terms[elements_.size() + k] = -grid_->weight(k) * f[k] * u[k];
    return pairwise_sum(terms);
  }

  /// dJ/du restricted to free nodes (zero on fixed nodes).
  std::vector<double> gradient(std::span<const double> u, std::span<const double> f) const {
    std::vector<double> out(u.size(), 0.0);
    for (const Element& e : elements_) {
      const Vec2 g = element_gradient(e, u);
      const double g2 = norm2(g);
      detail::check_gradient(g2, pp_.q);
      const double d = e.area * D_(g2 + pp_.eps);
      scatter(e, {d * g[0], d * g[1]}, out);
    }
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = is_free(k) ? out[k] - grid_->weight(k) * f[k] : 0.0;
    return out;
  }

  /// Frozen second-derivative coefficients at a state u.
  struct Linearization {
    std::vector<double> d;      // area * D(w)
    std::vector<double> slope;  // area * 2D'(w)
    std::vector<Vec2> g;
  };

  Linearization linearize(std::span<const double> u) const {
    Linearization lin;
    lin.d.resize(elements_.size());
    lin.slope.resize(elements_.size());
    lin.g.resize(elements_.size());
    for (std::size_t m = 0; m < elements_.size(); ++m) {
      const Element& e = elements_[m];
      const Vec2 g = element_gradient(e, u);
      const double w = norm2(g) + pp_.eps;
      lin.d[m] = e.area * D_(w);
      lin.slope[m] = e.area * D_.slope(w);
      lin.g[m] = g;
    }
    return lin;
  }

  /// Hessian-vector product on free nodes.
  void hessian_apply(const Linearization& lin, std::span<const double> v, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t m = 0; m < elements_.size(); ++m) {
      const Element& e = elements_[m];
      const Vec2 gv = element_gradient(e, v);
      const double c = lin.slope[m] * dot(lin.g[m], gv);
      scatter(e, {lin.d[m] * gv[0] + c * lin.g[m][0], lin.d[m] * gv[1] + c * lin.g[m][1]}, out);
    }
    for (std::size_t k = 0; k < out.size(); ++k)
      if (!is_free(k)) out[k] = 0.0;
  }

  /// Diagonal of the Hessian on free nodes (1 on fixed nodes).
  std::vector<double> hessian_diagonal(const Linearization& lin) const {
    std::vector<double> diag(grid_->size(), 0.0);
    for (std::size_t m = 0; m < elements_.size(); ++m) {
      const Element& e = elements_[m];
      // d(g)/d(u_a) = (sx, 0), d(g)/d(u_b) = (0, sy), d(g)/d(u_c) = (-sx, -sy)
      const Vec2 da{e.sx, 0.0}, db{0.0, e.sy}, dc{-e.sx, -e.sy};
      auto quad = [&](const Vec2& dg) {
        const double gd = dot(lin.g[m], dg);
        return lin.d[m] * norm2(dg) + lin.slope[m] * gd * gd;
      };
      diag[e.a] += quad(da);
      diag[e.c] += quad(dc);
      if (e.sy != 0.0) diag[e.b] += quad(db);
    }
    for (std::size_t k = 0; k < diag.size(); ++k)
      if (!is_free(k) || !(diag[k] > 0.0)) diag[k] = 1.0;
    return diag;
  }

  /// Nodal residual r = dJ/du / weight; its discrete L2 norm sqrt(sum weight r^2).
  double residual_norm(std::span<const double> grad) const {
    std::vector<double> terms(grad.size(), 0.0);
    for (std::size_t k = 0; k < grad.size(); ++k)
      if (is_free(k) && grid_->weight(k) > 0.0) terms[k] = grad[k] * grad[k] / grid_->weight(k);
    return std::sqrt(pairwise_sum(terms));
  }

 private:
  // Adds the element's pairing of a flux vector with d(g)/du to out.
  void scatter(const Element& e, const Vec2& flux, std::span<double> out) const {
    const double fa = flux[0] * e.sx;
    out[e.a] += fa;
    out[e.c] -= fa;
    if (e.sy != 0.0) {
      const double fb = flux[1] * e.sy;
      out[e.b] += fb;
      out[e.c] -= fb;
    }
  }

  GridPtr grid_;
  ProblemParams pp_;
  FluxWeight D_;
  std::vector<Element> elements_;
  std::vector<std::uint8_t> free_;
};

}  // namespace pqfrac
