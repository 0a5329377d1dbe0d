/// @file norms.hpp
/// @brief Lebesgue, Sobolev, Nikolskii and Gagliardo norms of grid fields,
///        plus boundary trace norms.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pqfrac/error.hpp"
#include "pqfrac/exponents.hpp"
#include "pqfrac/field.hpp"

namespace pqfrac {

/// A lattice shift h = (di*hx, dj*hy).
struct Shift {
  int di = 0;
  int dj = 0;
  double length = 0.0;
};

/// Shifts used in the supremum of the Nikolskii seminorm: all axis and
/// diagonal lattice shifts (both orientations) with 0 < |h| <= max_length.
struct ShiftSet {
  std::vector<Shift> shifts;

  /// max_length <= 0 selects the inradius, the largest |h| for which
  /// {x : dist(x, boundary) >= |h|} is nonempty.
  static ShiftSet lattice(const Grid& g, double max_length = 0.0) {
    if (!(max_length > 0.0)) max_length = g.inradius();
    const double slack = 1e-12 * max_length;
    ShiftSet s;
    const int dirs1[2][2] = {{1, 0}, {-1, 0}};
    const int dirs2[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
    const int ndirs = g.dim() == 1 ? 2 : 8;
    const int kmax = std::max(g.n(0), g.dim() == 2 ? g.n(1) : 0);
    for (int k = 1; k <= kmax; ++k) {
      for (int d = 0; d < ndirs; ++d) {
        const int di = (g.dim() == 1 ? dirs1[d][0] : dirs2[d][0]) * k;
        const int dj = g.dim() == 1 ? 0 : dirs2[d][1] * k;
        const double len = std::hypot(di * g.h(0), g.dim() == 2 ? dj * g.h(1) : 0.0);
        if (len <= max_length + slack) s.shifts.push_back({di, dj, len});
      }
    }
    if (s.shifts.empty()) throw EmptyShiftSet("no lattice shift fits inside the domain");
    return s;
  }
};

namespace detail {

inline void require_order(double r, double min_r, const char* what) {
  if (!(r >= min_r) || !std::isfinite(r)) throw OrderOutOfRange(what);
}

/// Quadrature weights for the nodes of {x : dist(x, boundary) >= len}: the
/// trapezoidal rule on the sub-box for intervals and rectangles, the grid
/// weights restricted to the subset on the disc.
inline std::vector<double> inner_weights(const Grid& g, double len) {
  const double slack = 1e-12 * g.diameter();
  std::vector<double> w(g.size(), 0.0);
  if (g.kind() == DomainKind::Disc) {
    for (std::size_t k = 0; k < g.size(); ++k)
      if (g.active(k) && g.dist_to_boundary(g.coord(k)) >= len - slack) w[k] = g.weight(k);
    return w;
  }
  int lo[2] = {0, 0}, hi[2] = {0, 0};
  for (int a = 0; a < g.dim(); ++a) {
    lo[a] = static_cast<int>(std::ceil((len - slack) / g.h(a)));
    hi[a] = g.n(a) - 1 - lo[a];
    if (lo[a] > hi[a]) return w;
  }
  auto axis_weight = [&](int a, int i) {
    if (i < lo[a] || i > hi[a] || lo[a] == hi[a]) return 0.0;
    return (i == lo[a] || i == hi[a]) ? 0.5 * g.h(a) : g.h(a);
  };
  for (std::size_t k = 0; k < g.size(); ++k) {
    double wk = axis_weight(0, g.ix(k));
    if (g.dim() == 2) wk *= axis_weight(1, g.iy(k));
    w[k] = wk;
  }
  return w;
}

}  // namespace detail

inline double lp_norm(const ScalarField& g, double r) {
  detail::require_order(r, 1.0, "L^r norm needs r >= 1");
  ScalarField a(g.grid);
  for (std::size_t k = 0; k < g.size(); ++k) a[k] = std::pow(std::abs(g[k]), r);
  return std::pow(integrate(a), 1.0 / r);
}

inline double lp_norm(const VectorField& g, double r) {
  detail::require_order(r, 1.0, "L^r norm needs r >= 1");
  ScalarField a(g.grid);
  for (std::size_t k = 0; k < g.size(); ++k) a[k] = std::pow(norm2(g[k]), 0.5 * r);
  return std::pow(integrate(a), 1.0 / r);
}

/// ||u||_{L^r} + ||grad u||_{L^r}.
inline double w1r_norm(const ScalarField& u, double r) { return lp_norm(u, r) + lp_norm(gradient(u), r); }

/// (max over shifts of  int_{Omega_|h|} |grad u(x+h) - grad u(x)|^r / |h|^2)^{1/r}
/// with Omega_|h| = {x : dist(x, boundary) >= |h|}.
inline double nikolskii_seminorm(const ScalarField& u, double r, const ShiftSet& shifts) {
  detail::require_order(r, 2.0, "Nikolskii seminorm needs r >= 2");
  if (shifts.shifts.empty()) throw EmptyShiftSet("empty shift set");
  const Grid& g = *u.grid;
  const VectorField gu = gradient(u);
  detail::require_finite(gu);
  double best = 0.0;
  std::vector<double> terms(g.size());
  for (const Shift& s : shifts.shifts) {
    const std::vector<double> w = detail::inner_weights(g, s.length);
    for (std::size_t k = 0; k < g.size(); ++k) {
      terms[k] = 0.0;
      if (w[k] == 0.0) continue;
      const long m = g.neighbor(k, s.di, s.dj);
      if (m < 0) continue;
      const Vec2 d{gu[m][0] - gu[k][0], gu[m][1] - gu[k][1]};
      terms[k] = w[k] * std::pow(norm2(d), 0.5 * r);
    }
    best = std::max(best, pairwise_sum(terms) / (s.length * s.length));
  }
  return std::pow(best, 1.0 / r);
}

inline double nikolskii_seminorm(const ScalarField& u, double r) {
  return nikolskii_seminorm(u, r, ShiftSet::lattice(*u.grid));
}

/// w1r_norm(u, p) + nikolskii_seminorm(u, r_i) for i in {1,4}; q replaces p
/// for i in {2,3}.
inline double nikolskii_norm(const ScalarField& u, const ProblemParams& pp, const ExponentTable& table, int i) {
  if (i < 1 || i > 4) throw OrderOutOfRange("Nikolskii norm index must be 1..4");
  const double base = (i == 1 || i == 4) ? pp.p : pp.q;
  return w1r_norm(u, base) + nikolskii_seminorm(u, table.r(i));
}

/// (sum over node pairs with |x-y| >= cutoff of w_x w_y |g(x)-g(y)|^r / |x-y|^{N+delta r})^{1/r}.
/// cutoff <= 0 selects one mesh width.
inline double gagliardo_seminorm(const ScalarField& g, double delta, double r, double cutoff = 0.0) {
  if (!(delta > 0.0 && delta < 1.0)) throw OrderOutOfRange("Gagliardo order must lie in (0,1)");
  detail::require_order(r, 1.0, "Gagliardo seminorm needs r >= 1");
  detail::require_finite(g);
  const Grid& G = *g.grid;
  if (!(cutoff > 0.0)) cutoff = G.hmin();
  const double cut2 = cutoff * cutoff * (1.0 - 1e-12);
  const double ex = 0.5 * (G.dim() + delta * r);
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < G.size(); ++k)
    if (G.active(k) && G.weight(k) > 0.0) nodes.push_back(k);
  std::vector<double> rows(nodes.size(), 0.0), row;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const std::size_t i = nodes[a];
    const Vec2 xi = G.coord(i);
    row.assign(nodes.size() - a - 1, 0.0);
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const std::size_t j = nodes[b];
      const double diff = std::abs(g[i] - g[j]);
      if (diff == 0.0) continue;
      const Vec2 xj = G.coord(j);
      const double d2 = (xi[0] - xj[0]) * (xi[0] - xj[0]) + (xi[1] - xj[1]) * (xi[1] - xj[1]);
      if (d2 < cut2) continue;
      row[b - a - 1] = G.weight(j) * std::pow(diff, r) / std::pow(d2, ex);
    }
    rows[a] = G.weight(i) * pairwise_sum(row);
  }
  return std::pow(2.0 * pairwise_sum(rows), 1.0 / r);
}

/// ||f||_{L^s} + gagliardo_seminorm(f, sigma, s).
inline double fractional_sobolev_norm(const ScalarField& f, double sigma, double s) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw OrderOutOfRange("fractional order must lie in (0,1)");
  return lp_norm(f, s) + gagliardo_seminorm(f, sigma, s);
}

/// (boundary integral of |g|^r)^{1/r}.
inline double boundary_lp_norm(const ScalarField& g, double r) {
  detail::require_order(r, 1.0, "boundary L^r norm needs r >= 1");
  ScalarField a(g.grid);
  for (std::size_t k : g.grid->boundary_nodes()) a[k] = std::pow(std::abs(g[k]), r);
  return std::pow(boundary_integrate(a), 1.0 / r);
}

inline double boundary_lp_norm(const VectorField& g, double r) {
  detail::require_order(r, 1.0, "boundary L^r norm needs r >= 1");
  ScalarField a(g.grid);
  for (std::size_t k : g.grid->boundary_nodes()) a[k] = std::pow(norm2(g[k]), 0.5 * r);
  return std::pow(boundary_integrate(a), 1.0 / r);
}

}  // namespace pqfrac
