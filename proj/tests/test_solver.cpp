#include <gtest/gtest.h>

#include <cmath>

#include "pqfrac/catalog.hpp"
#include "pqfrac/expr.hpp"
#include "pqfrac/norms.hpp"
#include "pqfrac/oracle.hpp"
#include "pqfrac/solver.hpp"

using namespace pqfrac;

namespace {

ProblemParams pure_p(double p) {
  ProblemParams pp;
  pp.p = p;
  pp.q = p;
  pp.beta = 0.0;
  return pp;
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

SolveConfig schedule(std::vector<double> eps) {
  SolveConfig cfg;
  cfg.eps_schedule = std::move(eps);
  return cfg;
}

}  // namespace

TEST(InvertMonotoneG, Examples) {
  EXPECT_EQ(invert_monotone_g(0.0, pure_p(3)), 0.0);
  EXPECT_DOUBLE_EQ(invert_monotone_g(4.0, pure_p(3)), 2.0);
  ProblemParams pp;
  EXPECT_NEAR(invert_monotone_g(1.0, pp), 0.754878, 1e-6);
  const double t = invert_monotone_g(1.0, pp);
  EXPECT_NEAR(t * t * t + t * t, 1.0, 1e-14);
}

TEST(InvertMonotoneG, ResidualAndOddness) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    ProblemParams pp;
    pp.p = rng.uniform(2.1, 6.0);
    pp.q = pp.p + rng.uniform(0.0, 3.0);
    pp.alpha = rng.log_uniform(1e-2, 1e2);
    pp.beta = rng.uniform(0.0, 2.0);
    const double y = rng.uniform(-1.0, 1.0) * rng.log_uniform(1e-6, 1e6);
    const double eps = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 1.0);
    const double t = invert_monotone_g(y, pp, eps);
    EXPECT_LE(std::abs(monotone_g(t, pp, eps) - y), 1e-12 * std::max(1.0, std::abs(y)));
    EXPECT_EQ(std::signbit(t), std::signbit(y));
    EXPECT_EQ(invert_monotone_g(-y, pp, eps), -t);
  }
}

TEST(Oracle1D, PureThreeLaplacian) {
  const Oracle1D u = oracle_1d("const 2", pure_p(3));
  EXPECT_NEAR(u(0.5), 1.0 / 3.0, 1e-10);
  EXPECT_NEAR(u.derivative(0.0), 1.0, 1e-10);
  EXPECT_NEAR(u(1.0), 0.0, 1e-10);
  for (double x : {0.1, 0.3, 0.7}) EXPECT_NEAR(u(x), (1 - std::pow(std::abs(1 - 2 * x), 1.5)) / 3, 1e-10);
}

TEST(Oracle1D, ZeroLoad) {
  const Oracle1D u = oracle_1d("const 0", ProblemParams{});
  for (double x : {0.0, 0.25, 0.5, 1.0}) EXPECT_EQ(u(x), 0.0);
}

TEST(Oracle1D, CoupledSlopeAtZero) {
  const Oracle1D u = oracle_1d("const 2", ProblemParams{});
  EXPECT_NEAR(u.derivative(0.0), 0.754878, 1e-6);
  EXPECT_NEAR(u.derivative(0.0), invert_monotone_g(1.0, ProblemParams{}), 1e-10);
}

TEST(Oracle1D, Homogeneity) {
  // g^{-1}(lambda^{p-1} y) = lambda g^{-1}(y) for beta = 0
  const ProblemParams pp = pure_p(3);
  const Oracle1D a = oracle_1d("sinpi(x) + 0.5", pp), b = oracle_1d("4*(sinpi(x) + 0.5)", pp);
  for (double x : {0.1, 0.37, 0.5, 0.81}) EXPECT_NEAR(b(x), 2.0 * a(x), 1e-10);
}

TEST(Oracle1D, AsymmetricLoadMeetsBoundaryCondition) {
  const Oracle1D u = oracle_1d("1 + 3*x^2", ProblemParams{});
  EXPECT_NEAR(u(1.0), 0.0, 1e-10);
  const double h = 1e-6;
  EXPECT_NEAR((u(0.4 + h) - u(0.4 - h)) / (2 * h), u.derivative(0.4), 1e-6);
}

TEST(SolveEps, ZeroLoadIsImmediate) {
  const auto g = Grid::rectangle(1, 1, 17, 17);
  const Solution s = solve_eps(ScalarField(g), ProblemParams{}, 0.1, ScalarField(g), SolveConfig{});
  EXPECT_LE(s.newton_iters, 1);
  for (double v : s.u.values) EXPECT_EQ(v, 0.0);
}

TEST(SolveEps, IndependentOfInitialGuess) {
  Rng rng(12);
  const auto g = Grid::rectangle(1, 1, 33, 33);
  const ScalarField f = eval_expr("4*sinpi(x)*sinpi(y) + 1", g);
  const ScalarField a = eval_expr(random_catalog_expr(rng, *g), g), b = eval_expr("sinpi(x)*sinpi(y)", g);
  ScalarField init(g);
  for (std::size_t k = 0; k < g->size(); ++k) init[k] = g->on_boundary(k) ? 0.0 : 3.0 * a[k] * b[k];
  const SolveConfig cfg;
  const Solution s0 = solve_eps(f, ProblemParams{}, 0.01, ScalarField(g), cfg);
  const Solution s1 = solve_eps(f, ProblemParams{}, 0.01, init, cfg);
  EXPECT_LE(max_diff(s0.u, s1.u), 10 * cfg.newton_tol);
  EXPECT_LE(s0.residual_norm, cfg.newton_tol);
  EXPECT_LE(s1.residual_norm, cfg.newton_tol);
}

TEST(SolveEps, BoundaryStaysZero) {
  const auto g = Grid::disc(1.0, 33);
  const Solution s = solve_eps(eval_expr("const 1", g), ProblemParams{}, 0.05, ScalarField(g), SolveConfig{});
  for (std::size_t k : g->boundary_nodes()) EXPECT_EQ(s.u[k], 0.0);
  EXPECT_NEAR(s.residual_norm, residual_norm(s.u, eval_expr("const 1", g), ProblemParams{}, 0.05), 1e-15);
}

TEST(SolveEps, RejectsNonzeroBoundaryGuess) {
  const auto g = Grid::interval(1.0, 17);
  EXPECT_THROW(solve_eps(ScalarField(g), ProblemParams{}, 0.1, eval_expr("x", g), SolveConfig{}), BoundaryViolation);
}

TEST(SolveEps, IterationCapRaisesNoConvergence) {
  const auto g = Grid::interval(1.0, 129);
  SolveConfig cfg;
  cfg.max_newton_iters = 1;
  try {
    solve_eps(eval_expr("const 2", g), pure_p(3), 1e-4, ScalarField(g), cfg);
    FAIL();
  } catch (const NoConvergence& e) {
    EXPECT_EQ(e.iterations(), 1);
    EXPECT_GT(e.last_residual(), cfg.newton_tol);
    EXPECT_EQ(e.eps(), 1e-4);
  }
}

TEST(SolveConfig, Validation) {
  EXPECT_THROW(validate(schedule({})), ConfigError);
  EXPECT_THROW(validate(schedule({1.0, 1.0})), ConfigError);
  EXPECT_THROW(validate(schedule({2.0, 0.5})), ConfigError);
  SolveConfig c;
  c.linesearch.armijo = 0.6;
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_NO_THROW(validate(SolveConfig{}));
  const auto s = geometric_schedule(1e-6);
  EXPECT_EQ(s.front(), 1.0);
  EXPECT_EQ(s.back(), 1e-6);
  EXPECT_EQ(s.size(), 21u);
}

TEST(ContinuationSolve, ZeroLoadStaysZero) {
  const auto g = Grid::interval(1.0, 65);
  const auto sols = continuation_solve(ScalarField(g), ProblemParams{}, schedule({1.0, 0.1, 0.01}));
  ASSERT_EQ(sols.size(), 3u);
  for (const Solution& s : sols)
    for (double v : s.u.values) EXPECT_EQ(v, 0.0);
}

TEST(ContinuationSolve, MatchesOracle) {
  const ProblemParams pp = pure_p(3);
  const Oracle1D exact = oracle_1d("const 2", pp);
  double prev = 0.0;
  for (int n : {129, 257, 513}) {
    const auto g = Grid::interval(1.0, n);
    const auto sols = continuation_solve(eval_expr("const 2", g), pp, SolveConfig{});
    const double err = max_diff(sols.back().u, exact.sample(g));
    EXPECT_LE(err, 1e-3);
    if (prev > 0.0) {
      EXPECT_GE(std::log2(prev / err), 1.0);
    }
    prev = err;
  }
}

TEST(ContinuationSolve, CoupledSlopeMatchesOracle) {
  const auto g = Grid::interval(1.0, 513);
  const auto sols = continuation_solve(eval_expr("const 2", g), ProblemParams{}, SolveConfig{});
  const ScalarField& u = sols.back().u;
  const double slope = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * g->h(0));
  EXPECT_NEAR(slope, 0.754878, 1e-2);
}

TEST(ContinuationSolve, IteratesContract) {
  const ProblemParams pp = pure_p(3);
  const auto g = Grid::interval(1.0, 257);
  const auto sols = continuation_solve(eval_expr("const 2", g), pp, SolveConfig{});
  double prev = 0.0;
  for (std::size_t k = 1; k < sols.size(); ++k) {
    ScalarField d(g);
    for (std::size_t i = 0; i < g->size(); ++i) d[i] = sols[k].u[i] - sols[k - 1].u[i];
    const double step = w1r_norm(d, pp.p);
    if (k > 1) {
      EXPECT_LT(step, prev);
    }
    prev = step;
  }
}

TEST(ContinuationSolve, EnergyOfNextStageIsMinimal) {
  const ProblemParams pp;
  const auto g = Grid::rectangle(1, 1, 33, 33);
  const ScalarField f = eval_expr("const 3", g);
  const auto sols = continuation_solve(f, pp, schedule({1.0, 0.5, 0.25, 0.125, 0.0625}));
  for (std::size_t k = 1; k < sols.size(); ++k) {
    const double e = sols[k].eps;
    EXPECT_LE(discrete_energy(sols[k].u, f, pp, e), discrete_energy(sols[k - 1].u, f, pp, e));
    EXPECT_NEAR(sols[k].energy_value, discrete_energy(sols[k].u, f, pp, e), 1e-14);
  }
}

TEST(ContinuationSolve, WarmStartSavesIterations) {
  const ProblemParams pp = pure_p(3);
  const auto g = Grid::interval(1.0, 513);
  const ScalarField f = eval_expr("const 2", g);
  const SolveConfig cfg;
  int warm = 0, cold = 0;
  for (const Solution& s : continuation_solve(f, pp, cfg)) warm += s.newton_iters;
  for (double e : cfg.eps_schedule) cold += solve_eps(f, pp, e, ScalarField(g), cfg).newton_iters;
  EXPECT_LT(warm, cold);
}

TEST(ContinuationSolve, FailureCarriesEps) {
  const auto g = Grid::interval(1.0, 129);
  const ScalarField f = eval_expr("const 2", g);
  SolveConfig cfg = schedule({1.0, 1e-3});
  cfg.max_newton_iters = solve_eps(f, pure_p(3), 1.0, ScalarField(g), cfg).newton_iters;
  try {
    continuation_solve(f, pure_p(3), cfg);
    FAIL();
  } catch (const NoConvergence& e) {
    EXPECT_EQ(e.eps(), 1e-3);
  }
}
