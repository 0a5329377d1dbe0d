/// @file operator.hpp
/// @brief The regularized (p,q)-Laplacian evaluated on node-collocated
///        derivatives: flux, operator, energy and linearization.
#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "pqfrac/error.hpp"
#include "pqfrac/exponents.hpp"
#include "pqfrac/field.hpp"

namespace pqfrac {

/// Pointwise coefficient functions of the regularized flux at w = |grad u|^2 + eps.
struct FluxWeight {
  double p, q, alpha, beta;

  explicit FluxWeight(const ProblemParams& pp) : p(pp.p), q(pp.q), alpha(pp.alpha), beta(pp.beta) {}

  /// D(w) = alpha w^{(p-2)/2} + beta w^{(q-2)/2}
  double operator()(double w) const {
    double d = alpha * std::pow(w, 0.5 * (p - 2));
    if (beta != 0.0) d += beta * std::pow(w, 0.5 * (q - 2));
    return d;
  }
  /// 2 D'(w) = alpha (p-2) w^{(p-4)/2} + beta (q-2) w^{(q-4)/2}
  double slope(double w) const {
    double d = alpha * (p - 2) * std::pow(w, 0.5 * (p - 4));
    if (beta != 0.0) d += beta * (q - 2) * std::pow(w, 0.5 * (q - 4));
    return d;
  }
  /// Energy density psi(w) = (alpha/p) w^{p/2} + (beta/q) w^{q/2}
  double density(double w) const {
    double e = alpha / p * std::pow(w, 0.5 * p);
    if (beta != 0.0) e += beta / q * std::pow(w, 0.5 * q);
    return e;
  }
};

namespace detail {

// |grad u|^2 above this bound would overflow w^{q/2} in double precision.
inline double gradient_cap(double q) { return std::pow(1e150, 2.0 / q); }

inline void check_gradient(double g2, double q) {
  if (!(g2 <= gradient_cap(q))) throw NonFiniteField("|grad u|^2 exceeds the overflow guard");
}

}  // namespace detail

/// Pointwise values of D_u = alpha(|grad u|^2+eps)^{(p-2)/2} + beta(...)^{(q-2)/2}.
inline ScalarField flux_weight(const ScalarField& u, const ProblemParams& pp) {
  const FluxWeight D(pp);
  const VectorField g = gradient(u);
  ScalarField out(u.grid);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!u.grid->active(k)) continue;
    const double g2 = norm2(g[k]);
    detail::check_gradient(g2, pp.q);
    out[k] = D(g2 + pp.eps);
  }
  return out;
}

/// D_u grad u at every node.
inline VectorField pq_flux(const ScalarField& u, const ProblemParams& pp) {
  const FluxWeight D(pp);
  VectorField g = gradient(u);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!u.grid->active(k)) continue;
    const double g2 = norm2(g[k]);
    detail::check_gradient(g2, pp.q);
    const double d = D(g2 + pp.eps);
    g[k] = {d * g[k][0], d * g[k][1]};
  }
  return g;
}

/// -div(pq_flux(u)) at interior nodes; zero on boundary nodes.
inline ScalarField apply_operator(const ScalarField& u, const ProblemParams& pp) {
  ScalarField out = divergence(pq_flux(u, pp));
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = u.grid->node_kind(k) == NodeKind::Interior ? -out[k] : 0.0;
  return out;
}

/// Quadrature of the regularized energy
///   J(u) = int (alpha/p) w^{p/2} + (beta/q) w^{q/2} - f u,  w = |grad u|^2 + eps.
inline double energy(const ScalarField& u, const ScalarField& f, const ProblemParams& pp) {
  const Grid& g = *u.grid;
  for (std::size_t k : g.boundary_nodes())
    if (std::abs(u[k]) > 1e-12) throw BoundaryViolation("u must vanish on the boundary");
  const FluxWeight D(pp);
  const VectorField gu = gradient(u);
  ScalarField dens(u.grid);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.active(k)) continue;
    const double g2 = norm2(gu[k]);
    detail::check_gradient(g2, pp.q);
    dens[k] = D.density(g2 + pp.eps) - f[k] * u[k];
  }
  return integrate(dens);
}

/// Gateaux derivative of apply_operator at u in direction w:
///   -div( D_u grad w + [alpha(p-2)w^{(p-4)/2} + beta(q-2)w^{(q-4)/2}] (grad u . grad w) grad u ).
inline ScalarField jacobian_apply(const ScalarField& u, const ScalarField& w, const ProblemParams& pp) {
  const FluxWeight D(pp);
  const VectorField gu = gradient(u);
  const VectorField gw = gradient(w);
  VectorField flux(u.grid);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!u.grid->active(k)) continue;
    const double g2 = norm2(gu[k]);
    detail::check_gradient(g2, pp.q);
    const double ww = g2 + pp.eps;
    const double d = D(ww);
    const double c = D.slope(ww) * dot(gu[k], gw[k]);
    flux[k] = {d * gw[k][0] + c * gu[k][0], d * gw[k][1] + c * gu[k][1]};
  }
  ScalarField out = divergence(flux);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = u.grid->node_kind(k) == NodeKind::Interior ? -out[k] : 0.0;
  return out;
}

}  // namespace pqfrac
