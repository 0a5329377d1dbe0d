#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pqfrac/catalog.hpp"
#include "pqfrac/expr.hpp"
#include "pqfrac/operator.hpp"
#include "pqfrac/oracle.hpp"

using namespace pqfrac;

namespace {

ProblemParams pure_p(double p, double eps) {
  ProblemParams pp;
  pp.p = p;
  pp.q = p;
  pp.beta = 0.0;
  pp.eps = eps;
  return pp;
}

ProblemParams pq(double eps) {
  ProblemParams pp;
  pp.eps = eps;
  return pp;
}

// Random smooth field vanishing on the boundary of the unit square.
ScalarField random_zero_trace(Rng& rng, const GridPtr& g) {
  const ScalarField a = eval_expr(random_catalog_expr(rng, *g), g);
  const ScalarField b = eval_expr(g->dim() == 1 ? "sinpi(x)" : "sinpi(x)*sinpi(y)", g);
  ScalarField u(g);
  for (std::size_t k = 0; k < g->size(); ++k) u[k] = a[k] * b[k];
  return u;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST(FluxWeight, LowerBoundAtFixedEps) {
  const ProblemParams pp = pq(0.01);
  const FluxWeight D(pp);
  for (double g2 : {0.0, 1e-6, 1.0, 1e3}) EXPECT_GE(D(g2 + pp.eps), pp.alpha * std::pow(pp.eps, 0.5 * (pp.p - 2)));
}

TEST(PqFlux, ZeroField) {
  const auto g = Grid::rectangle(1, 1, 9, 9);
  const VectorField F = pq_flux(ScalarField(g), pq(0.5));
  for (std::size_t k = 0; k < g->size(); ++k) EXPECT_EQ(norm2(F[k]), 0.0);
}

TEST(PqFlux, UnitSlopeDegenerateLimit) {
  const auto g = Grid::interval(1.0, 17);
  const VectorField F = pq_flux(eval_expr("x", g), pure_p(3, 0.0));
  for (std::size_t k = 0; k < g->size(); ++k) EXPECT_NEAR(F[k][0], 1.0, 1e-12);
}

TEST(PqFlux, UnitSlopeWithBothTerms) {
  const auto g = Grid::interval(1.0, 17);
  const VectorField F = pq_flux(eval_expr("x", g), pq(1.0));
  for (std::size_t k = 0; k < g->size(); ++k) EXPECT_NEAR(F[k][0], std::sqrt(2.0) + 2.0, 1e-12);
}

TEST(PqFlux, OverflowIsReported) {
  const auto g = Grid::interval(1.0, 17);
  EXPECT_THROW(pq_flux(eval_expr("1e200*x", g), pq(1.0)), NonFiniteField);
}

TEST(ApplyOperator, AffineVanishesInside) {
  const auto g = Grid::rectangle(1, 1, 17, 17);
  EXPECT_LE(max_abs(apply_operator(eval_expr("3*x - y + 2", g), pq(0.3))), 1e-9);
}

TEST(ApplyOperator, SineAtMidpoint) {
  // -(sqrt(u'^2+1) u')' at x = 1/2 with u = sin(pi x) equals pi^2
  double prev = 0.0;
  for (int n : {65, 129, 257}) {
    const auto g = Grid::interval(1.0, n);
    const ScalarField r = apply_operator(eval_expr("sinpi(x)", g), pure_p(3, 1.0));
    const double err = std::abs(r[g->index((n - 1) / 2)] - std::numbers::pi * std::numbers::pi);
    if (prev > 0.0) {
      EXPECT_GE(std::log2(prev / err), 1.9);
    }
    prev = err;
  }
  EXPECT_LE(prev, 1e-3 * std::numbers::pi * std::numbers::pi);
}

TEST(ApplyOperator, RegularizedOracleResidualShrinks) {
  // exact solution of the eps = 0.1 problem with f = 2
  ProblemParams pp = pure_p(3, 0.1);
  double prev = 0.0;
  for (int n : {257, 513, 1025}) {
    const auto g = Grid::interval(1.0, n);
    const ScalarField r = apply_operator(oracle_1d("const 2", pp, pp.eps).sample(g), pp);
    double err = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k)
      if (g->node_kind(k) == NodeKind::Interior) err = std::max(err, std::abs(r[k] - 2.0));
    EXPECT_LE(err, 2.0 * g->h(0));
    if (prev > 0.0) {
      EXPECT_GE(std::log2(prev / err), 1.0);
    }
    prev = err;
  }
}

TEST(ApplyOperator, DegenerateOracleResidualShrinksInL2) {
  // u* = (1 - |1-2x|^{3/2})/3 solves -(|u'|u')' = 2; u* is only C^{1,1/2} at
  // x = 1/2, where the nodal residual stays O(1), so the mean-square residual
  // decays like h^{1/2}
  double prev = 0.0;
  for (int n : {257, 513, 1025}) {
    const auto g = Grid::interval(1.0, n);
    const ScalarField r = apply_operator(eval_expr("(1 - (abs(1-2*x))^1.5)/3", g), pure_p(3, 1e-12));
    ScalarField sq(g);
    for (std::size_t k = 0; k < g->size(); ++k)
      if (g->node_kind(k) == NodeKind::Interior) sq[k] = (r[k] - 2.0) * (r[k] - 2.0);
    const double err = std::sqrt(integrate(sq));
    if (prev > 0.0) {
      EXPECT_GE(std::log2(prev / err), 0.45);
    }
    prev = err;
  }
}

TEST(Energy, ZeroFieldClosedForm) {
  const auto g = Grid::rectangle(2, 1, 9, 9);
  const ProblemParams pp = pq(0.25);
  const double expected = 2.0 * (pp.alpha * std::pow(0.25, 1.5) / 3 + pp.beta * std::pow(0.25, 2.0) / 4);
  EXPECT_NEAR(energy(ScalarField(g), eval_expr("const 5", g), pp), expected, 1e-14);
}

TEST(Energy, RejectsBoundaryValues) {
  const auto g = Grid::interval(1.0, 9);
  EXPECT_THROW(energy(eval_expr("x", g), ScalarField(g), pq(1.0)), BoundaryViolation);
}

TEST(Energy, DirectionalDerivativeMatchesFlux) {
  Rng rng(17);
  const auto g = Grid::rectangle(1, 1, 33, 33);
  const ProblemParams pp = pq(0.1);
  const ScalarField u = random_zero_trace(rng, g), w = random_zero_trace(rng, g);
  const ScalarField f = eval_expr("1 + x*y", g);
  const double d = 1e-5;
  ScalarField up(g), um(g);
  for (std::size_t k = 0; k < g->size(); ++k) {
    up[k] = u[k] + d * w[k];
    um[k] = u[k] - d * w[k];
  }
  const double fd = (energy(up, f, pp) - energy(um, f, pp)) / (2 * d);
  const VectorField F = pq_flux(u, pp);
  const VectorField gw = gradient(w);
  ScalarField a(g);
  for (std::size_t k = 0; k < g->size(); ++k) a[k] = dot(F[k], gw[k]) - f[k] * w[k];
  const double exact = integrate(a);
  EXPECT_NEAR(fd, exact, 1e-6 * std::abs(exact));
}

TEST(Energy, GradientConsistentWithOperator) {
  // int F.grad w - f w  versus  int (A(u) - f) w : second-order gap
  const ProblemParams pp = pq(0.5);
  double prev = 0.0;
  for (int n : {33, 65, 129}) {
    const auto g = Grid::rectangle(1, 1, n, n);
    Rng local(23);
    const ScalarField u = random_zero_trace(local, g), w = random_zero_trace(local, g);
    const VectorField F = pq_flux(u, pp);
    const VectorField gw = gradient(w);
    const ScalarField A = apply_operator(u, pp);
    ScalarField a(g), b(g);
    for (std::size_t k = 0; k < g->size(); ++k) {
      a[k] = dot(F[k], gw[k]);
      b[k] = A[k] * w[k];
    }
    const double gap = std::abs(integrate(a) - integrate(b));
    if (prev > 0.0) {
      EXPECT_GE(std::log2(prev / gap), 1.8);
    }
    prev = gap;
  }
}

TEST(JacobianApply, ZeroStateIsScaledLaplacian) {
  const auto g = Grid::rectangle(1, 1, 17, 17);
  const ProblemParams pp = pq(0.2);
  const ScalarField w = eval_expr("sinpi(x)*sinpi(2*y)", g);
  const ScalarField J = jacobian_apply(ScalarField(g), w, pp);
  const ScalarField lap = divergence(gradient(w));
  const double c = pp.alpha * std::pow(0.2, 0.5 * (pp.p - 2)) + pp.beta * std::pow(0.2, 0.5 * (pp.q - 2));
  for (std::size_t k = 0; k < g->size(); ++k)
    if (g->node_kind(k) == NodeKind::Interior) {
      EXPECT_NEAR(J[k], -c * lap[k], 1e-10 * (1 + std::abs(lap[k])));
    }
}

TEST(JacobianApply, SecondOrderConsistency) {
  Rng rng(5);
  const auto g = Grid::rectangle(1, 1, 33, 33);
  const ProblemParams pp = pq(0.3);
  const ScalarField u = random_zero_trace(rng, g), w = random_zero_trace(rng, g);
  const ScalarField A0 = apply_operator(u, pp), J = jacobian_apply(u, w, pp);
  double prev = 0.0;
  for (double d : {1e-2, 5e-3, 2.5e-3}) {
    ScalarField ud(g);
    for (std::size_t k = 0; k < g->size(); ++k) ud[k] = u[k] + d * w[k];
    const ScalarField Ad = apply_operator(ud, pp);
    double r = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k) r = std::max(r, std::abs(Ad[k] - A0[k] - d * J[k]));
    if (prev > 0.0) {
      EXPECT_NEAR(prev / r, 4.0, 0.4);
    }
    prev = r;
  }
}

TEST(JacobianApply, EllipticLowerBound) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    Rng rng(seed);
    const auto g = Grid::rectangle(1, 1, 65, 65);
    const ProblemParams pp = pq(rng.uniform(0.01, 1.0));
    const ScalarField u = random_zero_trace(rng, g), w = random_zero_trace(rng, g);
    const ScalarField J = jacobian_apply(u, w, pp);
    ScalarField a(g);
    for (std::size_t k = 0; k < g->size(); ++k) a[k] = J[k] * w[k];
    const VectorField gw = gradient(w);
    ScalarField gw2(g);
    for (std::size_t k = 0; k < g->size(); ++k) gw2[k] = norm2(gw[k]);
    const double bound = pp.alpha * std::pow(pp.eps, 0.5 * (pp.p - 2)) * integrate(gw2);
    EXPECT_GE(integrate(a), bound);
  }
}

TEST(PqFlux, Monotone) {
  Rng rng(8);
  const auto g = Grid::rectangle(1, 1, 33, 33);
  for (int trial = 0; trial < 10; ++trial) {
    const ProblemParams pp = pq(rng.uniform(1e-4, 1.0));
    const ScalarField u = eval_expr(random_catalog_expr(rng, *g), g), v = eval_expr(random_catalog_expr(rng, *g), g);
    const VectorField Fu = pq_flux(u, pp), Fv = pq_flux(v, pp), gu = gradient(u), gv = gradient(v);
    ScalarField a(g);
    for (std::size_t k = 0; k < g->size(); ++k)
      a[k] = dot({Fu[k][0] - Fv[k][0], Fu[k][1] - Fv[k][1]}, {gu[k][0] - gv[k][0], gu[k][1] - gv[k][1]});
    EXPECT_GT(integrate(a), 0.0);
  }
}
