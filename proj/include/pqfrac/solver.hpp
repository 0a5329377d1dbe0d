/// @file solver.hpp
/// @brief Damped Newton solver for the regularized problem and the
///        eps-continuation driver.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "pqfrac/discrete_energy.hpp"
#include "pqfrac/error.hpp"
#include "pqfrac/exponents.hpp"
#include "pqfrac/field.hpp"

namespace pqfrac {

struct LineSearchParams {
  double backtrack = 0.5;
  double armijo = 1e-4;
};

/// eps_k = ratio^k for k = 0, 1, ... while above eps_min, then eps_min.
inline std::vector<double> geometric_schedule(double eps_min, double ratio = 0.5) {
  if (!(eps_min > 0.0 && eps_min <= 1.0)) throw ConfigError("eps_min must lie in (0,1]");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("schedule ratio must lie in (0,1)");
  std::vector<double> s;
  for (double e = 1.0; e > eps_min * (1.0 + 1e-12); e *= ratio) s.push_back(e);
  s.push_back(eps_min);
  return s;
}

struct SolveConfig {
  std::vector<double> eps_schedule = geometric_schedule(1e-6);
  double newton_tol = 1e-8;
  int max_newton_iters = 200;
  LineSearchParams linesearch;
  double linear_tol = 1e-10;
  int max_linear_iters = 0;  ///< 0 selects 10 * (number of unknowns)
};

inline void validate(const SolveConfig& cfg) {
  const auto& s = cfg.eps_schedule;
  if (s.empty()) throw ConfigError("eps_schedule is empty");
  if (!(s.front() > 0.0 && s.front() <= 1.0)) throw ConfigError("eps_schedule must start in (0,1]");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > 0.0 && s[i] < s[i - 1])) throw ConfigError("eps_schedule must be strictly decreasing and positive");
  if (!(cfg.newton_tol > 0.0) || !(cfg.linear_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (cfg.max_newton_iters < 1) throw ConfigError("max_newton_iters must be positive");
  if (!(cfg.linesearch.backtrack > 0.0 && cfg.linesearch.backtrack < 1.0))
    throw ConfigError("line search backtracking factor must lie in (0,1)");
  if (!(cfg.linesearch.armijo > 0.0 && cfg.linesearch.armijo < 0.5))
    throw ConfigError("Armijo constant must lie in (0,1/2)");
}

struct Solution {
  ScalarField u;
  double eps = 0.0;
  double residual_norm = 0.0;
  int newton_iters = 0;
  int linear_iters = 0;
  double energy_value = 0.0;
};

namespace detail {

inline std::string fmt_eps(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", e);
  return buf;
}

/// Preconditioner: exact tridiagonal factorization in 1D, Jacobi in 2D.
class NewtonPreconditioner {
 public:
  NewtonPreconditioner(const DiscreteEnergy& E, const DiscreteEnergy::Linearization& lin) : E_(E) {
    const std::size_t n = E.grid().size();
    if (E.grid().dim() == 2) {
      diag_ = E.hessian_diagonal(lin);
      return;
    }
    diag_.assign(n, 0.0);
    off_.assign(n, 0.0);
    const auto& els = E.elements();
    for (std::size_t m = 0; m < els.size(); ++m) {
      const auto& e = els[m];
      const double gs = lin.g[m][0] * e.sx;
      const double k = lin.d[m] * e.sx * e.sx + lin.slope[m] * gs * gs;
      const std::size_t i = std::min(e.a, e.c);
      diag_[e.a] += k;
      diag_[e.c] += k;
      off_[i] -= k;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!E.is_free(i)) {
        diag_[i] = 1.0;
        off_[i] = 0.0;
        if (i > 0) off_[i - 1] = 0.0;
      }
    }
    // Thomas factorization: c_[i] = off_[i] / pivot_i.
    piv_.assign(n, 0.0);
    cp_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double lower = i > 0 ? off_[i - 1] : 0.0;
      piv_[i] = diag_[i] - (i > 0 ? lower * cp_[i - 1] : 0.0);
      cp_[i] = off_[i] / piv_[i];
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    const std::size_t n = r.size();
    if (E_.grid().dim() == 2) {
      for (std::size_t i = 0; i < n; ++i) z[i] = E_.is_free(i) ? r[i] / diag_[i] : 0.0;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double lower = i > 0 ? off_[i - 1] * z[i - 1] : 0.0;
      z[i] = (r[i] - lower) / piv_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) z[i] -= cp_[i] * z[i + 1];
    for (std::size_t i = 0; i < n; ++i)
      if (!E_.is_free(i)) z[i] = 0.0;
  }

 private:
  const DiscreteEnergy& E_;
  std::vector<double> diag_, off_, piv_, cp_;
};

/// Preconditioned conjugate gradients for H x = b on the free nodes.
/// Returns the iteration count.
inline int pcg(const DiscreteEnergy& E, const DiscreteEnergy::Linearization& lin, std::span<const double> b,
               std::span<double> x, double rel_tol, int max_iters) {
  const std::size_t n = b.size();
  const NewtonPreconditioner M(E, lin);
  std::fill(x.begin(), x.end(), 0.0);
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), Ap(n);
  const double bnorm = std::sqrt(dot(r, r));
  if (bnorm == 0.0) return 0;
  M.apply(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iters; ++it) {
    E.hessian_apply(lin, p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) return it;
    const double a = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += a * p[i];
      r[i] -= a * Ap[i];
    }
    if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) return it;
    M.apply(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return max_iters;
}

}  // namespace detail

/// Minimizes the discrete regularized energy at level eps by damped Newton
/// from the initial guess init. Boundary values stay fixed at zero.
inline Solution solve_eps(const ScalarField& f, const ProblemParams& pp, double eps, const ScalarField& init,
                          const SolveConfig& cfg) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("eps must lie in (0,1]");
  detail::require_finite(f);
  detail::require_finite(init);
  const Grid& g = *f.grid;
  for (std::size_t k : g.boundary_nodes())
    if (init[k] != 0.0) throw BoundaryViolation("initial guess must vanish on the boundary");

  const DiscreteEnergy E(f.grid, pp.with_eps(eps));
  const std::size_t n = g.size();
  const int max_linear = cfg.max_linear_iters > 0 ? cfg.max_linear_iters : static_cast<int>(10 * n);

  std::vector<double> u = init.values;
  for (std::size_t k = 0; k < n; ++k)
    if (!g.active(k)) u[k] = 0.0;
  std::vector<double> grad = E.gradient(u, f.values);
  double res = E.residual_norm(grad);
  double J = E.value(u, f.values);

  Solution sol;
  sol.eps = eps;
  std::vector<double> d(n), rhs(n), trial(n);
  int it = 0;
  for (; res > cfg.newton_tol; ++it) {
    if (it == cfg.max_newton_iters)
      throw NoConvergence("Newton did not converge at eps=" + detail::fmt_eps(eps), it, res, eps);
    const auto lin = E.linearize(u);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = -grad[k];
    sol.linear_iters += detail::pcg(E, lin, rhs, d, cfg.linear_tol, max_linear);
    double slope = dot(grad, d);
    if (!(slope < 0.0)) {
      const auto diag = E.hessian_diagonal(lin);
      for (std::size_t k = 0; k < n; ++k) d[k] = E.is_free(k) ? -grad[k] / diag[k] : 0.0;
      slope = dot(grad, d);
    }

    double lambda = 1.0;
    for (;;) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = u[k] + lambda * d[k];
      double Jt = 0.0;
      bool finite = true;
      try {
        Jt = E.value(trial, f.values);
      } catch (const NonFiniteField&) {
        finite = false;
      }
      if (finite) {
        if (Jt <= J + cfg.linesearch.armijo * lambda * slope) break;
        // Energy changes at roundoff level: accept if the residual drops.
        if (std::abs(Jt - J) <= 64 * 2.2e-16 * std::max(1.0, std::abs(J))) {
          const double rt = E.residual_norm(E.gradient(trial, f.values));
          if (rt < res) break;
        }
      }
      lambda *= cfg.linesearch.backtrack;
      if (lambda < 1e-12) throw LineSearchStall("line search step below 1e-12 at eps=" + detail::fmt_eps(eps));
    }
    u.swap(trial);
    grad = E.gradient(u, f.values);
    res = E.residual_norm(grad);
    J = E.value(u, f.values);
  }
  sol.u = ScalarField(f.grid, std::move(u));
  sol.residual_norm = res;
  sol.newton_iters = it;
  sol.energy_value = J;
  return sol;
}

/// Discrete energy of u at level eps (the quantity Newton minimizes).
inline double discrete_energy(const ScalarField& u, const ScalarField& f, const ProblemParams& pp, double eps) {
  const DiscreteEnergy E(u.grid, pp.with_eps(eps));
  return E.value(u.values, f.values);
}

/// Discrete L2 norm of the residual of u at level eps.
inline double residual_norm(const ScalarField& u, const ScalarField& f, const ProblemParams& pp, double eps) {
  const DiscreteEnergy E(u.grid, pp.with_eps(eps));
  return E.residual_norm(E.gradient(u.values, f.values));
}

/// Solves along cfg.eps_schedule, warm-starting each stage from the previous
/// one (the first stage starts from init, or zero when init is empty).
inline std::vector<Solution> continuation_solve(const ScalarField& f, const ProblemParams& pp, const SolveConfig& cfg,
                                                const ScalarField& init = {}) {
  validate(cfg);
  std::vector<Solution> out;
  out.reserve(cfg.eps_schedule.size());
  ScalarField start = init.grid ? init : ScalarField(f.grid);
  for (double eps : cfg.eps_schedule) {
    try {
      out.push_back(solve_eps(f, pp, eps, start, cfg));
    } catch (const NoConvergence& e) {
      throw NoConvergence(e.what(), e.iterations(), e.last_residual(), eps);
    }
    start = out.back().u;
  }
  return out;
}

}  // namespace pqfrac
