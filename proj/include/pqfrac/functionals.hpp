/// @file functionals.hpp
/// @brief Energy functionals I_{a,gamma,t}, the second-order functional S_r
///        and the boundary terms D_u, G_u and F_t.
///
/// Notation: w = |grad u|^2 + eps, H = D^2 u, g = H grad u.
#pragma once

#include <cmath>
#include <cstddef>

#include "pqfrac/error.hpp"
#include "pqfrac/exponents.hpp"
#include "pqfrac/field.hpp"
#include "pqfrac/operator.hpp"

namespace pqfrac {

struct EnergyFunctionals {
  double I1 = 0.0;
  double I2 = 0.0;
  double I3 = 0.0;
  double I = 0.0;
  /// I2 with the integrand (sum_j g_j)^2 in place of (grad u . g)^2.
  double I2_alt = 0.0;
  /// Smallest value of the I2 integrand over the nodes.
  double I2_min_integrand = 0.0;
  double a = 0.0, gamma = 0.0, t = 0.0, eps = 0.0;
};

/// I1 = gamma (a-2+t) int w^{(a-4+t)/2} |g|^2,
/// I2 = gamma (a-2) t int w^{(a-6+t)/2} (grad u . g)^2,
/// I3 = gamma int w^{(a-2+t)/2} |H|_F^2.
inline EnergyFunctionals functional_I(const ScalarField& u, double a, double gamma, double t, double eps) {
  if (!(eps > 0.0)) throw OrderOutOfRange("functional_I needs eps > 0");
  const Grid& G = *u.grid;
  const VectorField gu = gradient(u);
  const MatrixField H = hessian(u);
  ScalarField f1(u.grid), f2(u.grid), f2alt(u.grid), f3(u.grid);
  EnergyFunctionals out;
  out.a = a;
  out.gamma = gamma;
  out.t = t;
  out.eps = eps;
  double min2 = 0.0;
  bool first = true;
  for (std::size_t k = 0; k < G.size(); ++k) {
    if (!G.active(k)) continue;
    const double w = norm2(gu[k]) + eps;
    const Vec2 g = matvec(H[k], gu[k]);
    const double ug = dot(gu[k], g);
    const double sg = g[0] + g[1];
    f1[k] = gamma * (a - 2 + t) * std::pow(w, 0.5 * (a - 4 + t)) * norm2(g);
    const double w2 = gamma * (a - 2) * t * std::pow(w, 0.5 * (a - 6 + t));
    f2[k] = w2 * ug * ug;
    f2alt[k] = w2 * sg * sg;
    f3[k] = gamma * std::pow(w, 0.5 * (a - 2 + t)) * frobenius2(H[k]);
    if (first || f2[k] < min2) min2 = f2[k];
    first = false;
  }
  out.I1 = integrate(f1);
  out.I2 = integrate(f2);
  out.I3 = integrate(f3);
  out.I2_alt = integrate(f2alt);
  out.I2_min_integrand = min2;
  out.I = out.I1 + out.I2 + out.I3;
  return out;
}

/// I_{p,alpha,t} + I_{q,beta,t}.
inline double functional_I_total(const ScalarField& u, const ProblemParams& pp, double t, double eps) {
  double total = functional_I(u, pp.p, pp.alpha, t, eps).I;
  if (pp.beta != 0.0) total += functional_I(u, pp.q, pp.beta, t, eps).I;
  return total;
}

/// S_r = int |grad v|_F^2 with v = w^{(r-2)/4} grad u, differentiating v
/// discretely.
inline double functional_S(const ScalarField& u, double r, double eps) {
  if (!(eps > 0.0)) throw OrderOutOfRange("functional_S needs eps > 0");
  const VectorField gu = gradient(u);
  VectorField v(u.grid);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!u.grid->active(k)) continue;
    const double s = std::pow(norm2(gu[k]) + eps, 0.25 * (r - 2));
    v[k] = {s * gu[k][0], s * gu[k][1]};
  }
  const MatrixField J = jacobian(v);
  ScalarField d(u.grid);
  for (std::size_t k = 0; k < u.size(); ++k) d[k] = frobenius2(J[k]);
  return integrate(d);
}

/// The three summands of S_r after the chain rule:
///   int w^{(r-2)/2}|H|^2,  (r-2) int w^{(r-4)/2}|g|^2,
///   ((r-2)^2/4) int |grad u|^2 w^{(r-6)/2} |g|^2.
struct SExpansion {
  double hess = 0.0;
  double mixed = 0.0;
  double square = 0.0;
  double total() const noexcept { return hess + mixed + square; }
};

inline SExpansion functional_S_expansion(const ScalarField& u, double r, double eps) {
  if (!(eps > 0.0)) throw OrderOutOfRange("functional_S needs eps > 0");
  const VectorField gu = gradient(u);
  const MatrixField H = hessian(u);
  ScalarField a(u.grid), b(u.grid), c(u.grid);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!u.grid->active(k)) continue;
    const double n2 = norm2(gu[k]);
    const double w = n2 + eps;
    const double g2 = norm2(matvec(H[k], gu[k]));
    a[k] = std::pow(w, 0.5 * (r - 2)) * frobenius2(H[k]);
    b[k] = (r - 2) * std::pow(w, 0.5 * (r - 4)) * g2;
    c[k] = 0.25 * (r - 2) * (r - 2) * n2 * std::pow(w, 0.5 * (r - 6)) * g2;
  }
  return {integrate(a), integrate(b), integrate(c)};
}

/// Upper bound for S_r: int w^{(r-2)/2}|H|^2 + ((r-2)(r+2)/4) int w^{(r-4)/2}|g|^2.
inline double functional_S_bound(const ScalarField& u, double r, double eps) {
  const VectorField gu = gradient(u);
  const MatrixField H = hessian(u);
  ScalarField a(u.grid);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!u.grid->active(k)) continue;
    const double w = norm2(gu[k]) + eps;
    const double g2 = norm2(matvec(H[k], gu[k]));
    a[k] = std::pow(w, 0.5 * (r - 2)) * frobenius2(H[k]) + 0.25 * (r - 2) * (r + 2) * std::pow(w, 0.5 * (r - 4)) * g2;
  }
  return integrate(a);
}

/// D_u and G_u on the boundary nodes (zero elsewhere), with
///   G_u = w^{t/2} du/dnu Lap u + t w^{(t-2)/2} Lap u du/dnu |grad u|^2.
struct BoundaryDG {
  ScalarField D;
  ScalarField G;
};

inline BoundaryDG boundary_DG(const ScalarField& u, double t, double eps, const ProblemParams& pp) {
  const Grid& g = *u.grid;
  const FluxWeight Dw(pp);
  const VectorField gu = gradient(u);
  const MatrixField H = hessian(u);
  BoundaryDG out{ScalarField(u.grid), ScalarField(u.grid)};
  for (std::size_t k : g.boundary_nodes()) {
    const double n2 = norm2(gu[k]);
    const double w = n2 + eps;
    const double dn = dot(gu[k], g.normal(k));
    const double lap = H[k][0] + H[k][3];
    out.D[k] = Dw(w);
    out.G[k] = std::pow(w, 0.5 * t) * dn * lap + t * std::pow(w, 0.5 * (t - 2)) * lap * dn * n2;
  }
  return out;
}

/// F_t = boundary integral of  sum_{i,j} A_i d_i(B_j) nu_j  with
/// A = D_u grad u and B = w^{t/2} grad u. Corner nodes of a rectangle are
/// left out when exclude_corners is set.
inline double boundary_F(const ScalarField& u, double t, double eps, const ProblemParams& pp,
                         bool exclude_corners = true) {
  const Grid& g = *u.grid;
  const FluxWeight Dw(pp);
  const VectorField gu = gradient(u);
  VectorField B(u.grid);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.active(k)) continue;
    const double s = std::pow(norm2(gu[k]) + eps, 0.5 * t);
    B[k] = {s * gu[k][0], s * gu[k][1]};
  }
  const MatrixField JB = jacobian(B);
  ScalarField integrand(u.grid);
  for (std::size_t k : g.boundary_nodes()) {
    const double d = Dw(norm2(gu[k]) + eps);
    const Vec2 A{d * gu[k][0], d * gu[k][1]};
    // (JB A)_j = sum_i d_i B_j A_i
    const Vec2 JA = matvec(JB[k], A);
    integrand[k] = dot(JA, g.normal(k));
  }
  return boundary_integrate(integrand, exclude_corners);
}

/// int (D_u grad u) . grad(-div(w^{t/2} grad u)).
inline double leme1_lhs(const ScalarField& u, double t, double eps, const ProblemParams& pp) {
  const Grid& g = *u.grid;
  const VectorField A = pq_flux(u, pp.with_eps(eps));
  const VectorField gu = gradient(u);
  VectorField B(u.grid);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.active(k)) continue;
    const double s = std::pow(norm2(gu[k]) + eps, 0.5 * t);
    B[k] = {s * gu[k][0], s * gu[k][1]};
  }
  ScalarField mdiv = divergence(B);
  for (double& v : mdiv.values) v = -v;
  const VectorField gd = gradient(mdiv);
  ScalarField prod(u.grid);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.active(k)) prod[k] = dot(A[k], gd[k]);
  return integrate(prod);
}

}  // namespace pqfrac
