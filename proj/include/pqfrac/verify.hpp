/// @file verify.hpp
/// @brief Numerical checks of the identities, inequalities and a priori
///        estimates satisfied by the regularized problem.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pqfrac/catalog.hpp"
#include "pqfrac/error.hpp"
#include "pqfrac/exponents.hpp"
#include "pqfrac/field.hpp"
#include "pqfrac/functionals.hpp"
#include "pqfrac/norms.hpp"
#include "pqfrac/solver.hpp"

namespace pqfrac {

struct GridMeta {
  int dim = 1;
  int n = 0;
  double h = 0.0;
};

inline GridMeta grid_meta(const Grid& g) { return {g.dim(), g.n(0), g.hmin()}; }

/// Outcome of one check. For an inequality lhs <= rhs the margin is rhs - lhs.
struct CheckResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double margin = 0.0;
  bool passed = false;
  GridMeta grid;
  double eps = 0.0;
  ProblemParams params;
  std::string detail;
  /// Extra named quantities in insertion order.
  std::vector<std::pair<std::string, double>> metrics;
};

/// Tolerance of the identity checks: 10 h (|lhs| + |rhs| + 1).
inline double identity_tolerance(double h, double lhs, double rhs) {
  return 10.0 * h * (std::abs(lhs) + std::abs(rhs) + 1.0);
}

namespace detail {

inline CheckResult make_result(std::string name, const ScalarField& u, double eps, const ProblemParams& pp) {
  CheckResult c;
  c.name = std::move(name);
  c.grid = grid_meta(*u.grid);
  c.eps = eps;
  c.params = pp.with_eps(eps);
  return c;
}

}  // namespace detail

/// int (D_u grad u) . grad(-div(w^{t/2} grad u)) = I_{p,alpha,t} + I_{q,beta,t} - F_t.
inline CheckResult check_leme1(const ScalarField& u, double t, double eps, const ProblemParams& pp) {
  CheckResult c = detail::make_result("leme1", u, eps, pp);
  const double lhs = leme1_lhs(u, t, eps, pp);
  const double Ip = functional_I(u, pp.p, pp.alpha, t, eps).I;
  const double Iq = pp.beta != 0.0 ? functional_I(u, pp.q, pp.beta, t, eps).I : 0.0;
  const double F = boundary_F(u, t, eps, pp);
  c.lhs = lhs;
  c.rhs = Ip + Iq - F;
  c.margin = -std::abs(c.lhs - c.rhs);
  c.passed = std::abs(c.lhs - c.rhs) <= identity_tolerance(c.grid.h, c.lhs, c.rhs);
  const double scale = std::abs(lhs) + std::abs(Ip + Iq) + std::abs(F);
  c.metrics = {{"t", t},
               {"I_p", Ip},
               {"I_q", Iq},
               {"F_t", F},
               {"relative_gap", scale > 0.0 ? std::abs(c.lhs - c.rhs) / scale : 0.0},
               {"tolerance", identity_tolerance(c.grid.h, c.lhs, c.rhs)}};
  if (u.grid->kind() == DomainKind::Rectangle) {
    c.metrics.emplace_back("corners_excluded", 4.0);
    c.detail = "rectangle corners excluded from F_t";
  }
  return c;
}

/// I2_{p,alpha,t} >= 0 and I2_{q,beta,t} >= 0, with the integrand checked
/// pointwise as well.
inline CheckResult check_leme2(const ScalarField& u, double t, double eps, const ProblemParams& pp) {
  CheckResult c = detail::make_result("leme2", u, eps, pp);
  const EnergyFunctionals ep = functional_I(u, pp.p, pp.alpha, t, eps);
  const EnergyFunctionals eq = functional_I(u, pp.q, pp.beta, t, eps);
  const double min_int = std::min(ep.I2_min_integrand, eq.I2_min_integrand);
  c.lhs = 0.0;
  c.rhs = std::min(ep.I2, eq.I2);
  c.margin = c.rhs - c.lhs;
  c.passed = c.rhs >= -1e-12 && min_int >= 0.0;
  c.metrics = {{"t", t},
               {"I2_p", ep.I2},
               {"I2_q", eq.I2},
               {"min_integrand", min_int},
               {"I2_p_alt", ep.I2_alt},
               {"I2_q_alt", eq.I2_alt}};
  return c;
}

/// S_r <= int w^{(r-2)/2}|H|^2 + ((r-2)(r+2)/4) int w^{(r-4)/2}|H grad u|^2.
inline CheckResult check_leme3(const ScalarField& u, double r, double eps, const ProblemParams& pp) {
  CheckResult c = detail::make_result("leme3", u, eps, pp);
  c.lhs = functional_S(u, r, eps);
  c.rhs = functional_S_bound(u, r, eps);
  c.margin = c.rhs - c.lhs;
  c.passed = c.margin >= -identity_tolerance(c.grid.h, c.lhs, c.rhs);
  c.metrics = {{"r", r}, {"tolerance", identity_tolerance(c.grid.h, c.lhs, c.rhs)}};
  return c;
}

/// Direct S_r against its three-term chain-rule expansion.
inline CheckResult check_s_expansion(const ScalarField& u, double r, double eps, const ProblemParams& pp) {
  CheckResult c = detail::make_result("s_expansion", u, eps, pp);
  const SExpansion e = functional_S_expansion(u, r, eps);
  c.lhs = functional_S(u, r, eps);
  c.rhs = e.total();
  c.margin = -std::abs(c.lhs - c.rhs);
  c.passed = std::abs(c.lhs - c.rhs) <= identity_tolerance(c.grid.h, c.lhs, c.rhs);
  c.metrics = {{"r", r},
               {"hess_term", e.hess},
               {"mixed_term", e.mixed},
               {"square_term", e.square},
               {"tolerance", identity_tolerance(c.grid.h, c.lhs, c.rhs)}};
  return c;
}

/// I_{t1} >= C1 (alpha S_{r1} + beta S_{r3}),  C1 = min{4/(r1+2), 4/(r3+2), 1}.
inline CheckResult check_prope1(const ScalarField& u, const ProblemParams& pp, const ExponentTable& table, double eps) {
  CheckResult c = detail::make_result("prope1", u, eps, pp);
  const double C1 = std::min({4.0 / (table.r1 + 2), 4.0 / (table.r3 + 2), 1.0});
  const double S1 = functional_S(u, table.r1, eps);
  const double S3 = pp.beta != 0.0 ? functional_S(u, table.r3, eps) : 0.0;
  c.lhs = C1 * (pp.alpha * S1 + pp.beta * S3);
  c.rhs = functional_I_total(u, pp, table.t1, eps);
  c.constant = C1;
  c.margin = c.rhs - c.lhs;
  c.passed = c.margin >= -identity_tolerance(c.grid.h, c.lhs, c.rhs);
  c.metrics = {{"S_r1", S1}, {"S_r3", S3}, {"t1", table.t1}, {"tolerance", identity_tolerance(c.grid.h, c.lhs, c.rhs)}};
  return c;
}

/// I_{t2} >= C (S_{r2} + S_{r4}),  C = min{4 beta/(r2+2), 4 alpha/(r4+2)}.
inline CheckResult check_prope2(const ScalarField& u, const ProblemParams& pp, const ExponentTable& table, double eps) {
  if (!(pp.beta > 0.0)) throw InapplicableTheorem("prope2 needs beta > 0");
  CheckResult c = detail::make_result("prope2", u, eps, pp);
  const double C = std::min(4.0 * pp.beta / (table.r2 + 2), 4.0 * pp.alpha / (table.r4 + 2));
  const double S2 = functional_S(u, table.r2, eps);
  const double S4 = functional_S(u, table.r4, eps);
  c.lhs = C * (S2 + S4);
  c.rhs = functional_I_total(u, pp, table.t2, eps);
  c.constant = C;
  c.margin = c.rhs - c.lhs;
  c.passed = c.margin >= -identity_tolerance(c.grid.h, c.lhs, c.rhs);
  c.metrics = {{"S_r2", S2}, {"S_r4", S4}, {"t2", table.t2}, {"tolerance", identity_tolerance(c.grid.h, c.lhs, c.rhs)}};
  return c;
}

// ---------------------------------------------------------------------------
// Vector inequality |U-V|^r <= C |U w_U - V w_V|^2,  w_X = (|X|^2+eps)^{(r-2)/4}

/// |U-V|^r / |U w_U - V w_V|^2, or 0 when the denominator vanishes.
inline double lemp4_ratio(const Vec2& U, const Vec2& V, double r, double eps) {
  const double wu = std::pow(norm2(U) + eps, 0.25 * (r - 2));
  const double wv = std::pow(norm2(V) + eps, 0.25 * (r - 2));
  const Vec2 d{U[0] * wu - V[0] * wv, U[1] * wu - V[1] * wv};
  const double den = norm2(d);
  if (!(den > 0.0)) return 0.0;
  const Vec2 uv{U[0] - V[0], U[1] - V[1]};
  return std::pow(norm2(uv), 0.5 * r) / den;
}

/// The eps values used by the calibration scan and the random sampling.
inline const std::vector<double>& lemp4_eps_set() {
  static const std::vector<double> s{1.0, 1e-3, 1e-6};
  return s;
}

/// Largest ratio over collinear pairs U = a e, V = b e with a, b in
/// {0, +-10^{-3..3}} on a logarithmic lattice.
inline double lemp4_scan(double r, double eps, int per_decade = 40) {
  std::vector<double> mags{0.0};
  const int total = 6 * per_decade;
  for (int i = 0; i <= total; ++i) {
    const double m = std::pow(10.0, -3.0 + 6.0 * i / total);
    mags.push_back(m);
    mags.push_back(-m);
  }
  double best = 0.0;
  for (double a : mags)
    for (double b : mags) best = std::max(best, lemp4_ratio({a, 0.0}, {b, 0.0}, r, eps));
  return best;
}

struct Lemp4Calibration {
  double r = 0.0;
  std::vector<double> scan_max;  ///< one per entry of lemp4_eps_set()
  double constant = 0.0;         ///< 2 * max of scan_max
  double variation = 0.0;        ///< (max - min) / max of scan_max
};

inline Lemp4Calibration calibrate_lemp4(double r) {
  Lemp4Calibration cal;
  cal.r = r;
  for (double e : lemp4_eps_set()) cal.scan_max.push_back(lemp4_scan(r, e));
  const auto [lo, hi] = std::minmax_element(cal.scan_max.begin(), cal.scan_max.end());
  cal.constant = 2.0 * *hi;
  cal.variation = *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  return cal;
}

/// Empirical sup of the ratio over random pairs: magnitudes log-uniform in
/// [1e-3, 1e3], uniform angles, eps drawn from lemp4_eps_set().
inline CheckResult check_lemp4(double r, long sample_count, std::uint64_t seed, double constant) {
  if (!(r >= 2.0)) throw OrderOutOfRange("lemp4 needs r >= 2");
  Rng rng(seed);
  const auto& eset = lemp4_eps_set();
  double sup = 0.0;
  for (long i = 0; i < sample_count; ++i) {
    const double e = eset[static_cast<std::size_t>(rng.integer(0, static_cast<int>(eset.size()) - 1))];
    const double mu = rng.log_uniform(1e-3, 1e3), th = rng.uniform(0.0, 2 * std::numbers::pi);
    const double mv = rng.log_uniform(1e-3, 1e3), ph = rng.uniform(0.0, 2 * std::numbers::pi);
    sup = std::max(sup, lemp4_ratio({mu * std::cos(th), mu * std::sin(th)}, {mv * std::cos(ph), mv * std::sin(ph)}, r, e));
  }
  CheckResult c;
  c.name = "lemp4";
  c.lhs = sup;
  c.rhs = constant;
  c.constant = constant;
  c.margin = constant - sup;
  c.passed = sup <= constant;
  c.metrics = {{"r", r}, {"samples", static_cast<double>(sample_count)}};
  return c;
}

/// Constant of the Nikolskii estimate derived from the vector inequality:
/// (a+b)^r <= 2^{r-1}(a^r+b^r) and [u]^r <= C_lemp4 S_r give
/// C = 2^{r-1} max(1, C_lemp4).
inline double lemp5_constant(double r, double lemp4_constant) {
  return std::pow(2.0, r - 1) * std::max(1.0, lemp4_constant);
}

/// (||u||_{W^{1,base}} + [u]_r)^r <= C (S_r + ||u||_{W^{1,base}}^r).
inline CheckResult check_lemp5(const ScalarField& u, double r, double base, double eps, double constant,
                               const ProblemParams& pp) {
  if (!(r >= base)) throw OrderOutOfRange("lemp5 needs r >= base");
  CheckResult c = detail::make_result("lemp5", u, eps, pp);
  const double w = w1r_norm(u, base);
  const double nik = nikolskii_seminorm(u, r);
  const double S = functional_S(u, r, eps);
  c.lhs = std::pow(w + nik, r);
  c.rhs = constant * (S + std::pow(w, r));
  c.constant = constant;
  c.margin = c.rhs - c.lhs;
  c.passed = c.lhs <= c.rhs;
  c.metrics = {{"r", r}, {"base", base}, {"w1_norm", w}, {"seminorm", nik}, {"S_r", S}};
  return c;
}

/// Internal step [u]_r^r <= C_lemp4 S_r.
inline CheckResult check_lemp5_seminorm(const ScalarField& u, double r, double eps, double lemp4_constant,
                                        const ProblemParams& pp) {
  CheckResult c = detail::make_result("lemp5_seminorm", u, eps, pp);
  c.lhs = std::pow(nikolskii_seminorm(u, r), r);
  c.rhs = lemp4_constant * functional_S(u, r, eps);
  c.constant = lemp4_constant;
  c.margin = c.rhs - c.lhs;
  c.passed = c.lhs <= c.rhs;
  c.metrics = {{"r", r}};
  return c;
}

// ---------------------------------------------------------------------------
// Checks on solutions

/// Boundary bound for solutions:
///   |F_t| <= C ||f||_{L^s(bdry)} (||grad u||^{t+1}_{L^{s'(t+1)}(bdry)} + eps^{(t+1)/2}).
/// The ratio of the two sides is compared with the pinned constant.
inline CheckResult check_lemb3(const Solution& sol, const ScalarField& f, double t, const ProblemParams& pp,
                               double constant, double residual_tol = 1e-6) {
  if (!(t > -1.0)) throw OrderOutOfRange("lemb3 needs t > -1");
  const double res = residual_norm(sol.u, f, pp, sol.eps);
  if (res > residual_tol) throw NotASolution("residual " + std::to_string(res) + " exceeds tolerance");
  CheckResult c = detail::make_result("lemb3", sol.u, sol.eps, pp);
  const double F = boundary_F(sol.u, t, sol.eps, pp);
  const double sp = pp.s / (pp.s - 1);
  const double fn = boundary_lp_norm(f, pp.s);
  const double gn = boundary_lp_norm(gradient(sol.u), sp * (t + 1));
  const double bracket = fn * (std::pow(gn, t + 1) + std::pow(sol.eps, 0.5 * (t + 1)));
  c.lhs = std::abs(F);
  c.rhs = bracket;
  c.constant = constant;
  const double ratio = bracket > 0.0 ? c.lhs / bracket : 0.0;
  c.margin = constant - ratio;
  c.passed = ratio <= constant;
  c.metrics = {{"t", t}, {"ratio", ratio}, {"F_t", F}, {"f_trace_norm", fn}, {"grad_trace_norm", gn},
               {"residual", res}};
  return c;
}

/// Largest boundary ratio on the reference family: interval, f = 2, p=3,
/// q=4, alpha=beta=1, s=2, n=513, t in {0,1,2}, eps = 2^-k for k = 0..20.
/// The pinned lemb3 constant is twice this value.
inline double calibrate_lemb3() {
  const ProblemParams pp;
  SolveConfig cfg;
  cfg.eps_schedule.clear();
  for (int k = 0; k <= 20; ++k) cfg.eps_schedule.push_back(std::ldexp(1.0, -k));
  const auto g = Grid::interval(1.0, 513);
  ScalarField f(g);
  for (double& v : f.values) v = 2.0;
  const auto sols = continuation_solve(f, pp, cfg);
  double worst = 0.0;
  for (double t : {0.0, 1.0, 2.0})
    for (const Solution& s : sols)
      for (const auto& [k, v] : check_lemb3(s, f, t, pp, 0.0).metrics)
        if (k == "ratio") worst = std::max(worst, v);
  return worst;
}

enum class Theorem { T1, T2, T3a, T3b };

inline std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::T2: return "T2";
    case Theorem::T3a: return "T3a";
    default: return "T3b";
  }
}

inline int theorem_index(Theorem t) {
  switch (t) {
    case Theorem::T1: return 1;
    case Theorem::T2: return 2;
    case Theorem::T3a: return 3;
    default: return 4;
  }
}

inline bool applicable(const ExponentTable& table, Theorem t) {
  switch (t) {
    case Theorem::T1: return table.thm1;
    case Theorem::T2: return table.thm2;
    case Theorem::T3a: return table.thm3a;
    default: return table.thm3b;
  }
}

/// Norms of the data entering the estimates.
struct DataNorms {
  double fractional = 0.0;  ///< ||f||_{W^{sigma,s}}
  double lp_conj = 0.0;     ///< ||f||_{L^{p'}}
  double lq_conj = 0.0;     ///< ||f||_{L^{q'}}
  double ls = 0.0;          ///< ||f||_{L^s}
  double lrho = 0.0;        ///< ||f||_{L^rho}
};

inline DataNorms data_norms(const ScalarField& f, const ProblemParams& pp, const ExponentTable& table) {
  DataNorms d;
  d.fractional = fractional_sobolev_norm(f, pp.sigma, pp.s);
  d.lp_conj = lp_norm(f, pp.p / (pp.p - 1));
  d.lq_conj = lp_norm(f, pp.q / (pp.q - 1));
  d.ls = lp_norm(f, pp.s);
  d.lrho = lp_norm(f, std::max(1.0, table.rho));
  return d;
}

/// Right-hand side of the a priori estimate without its constant, including
/// the eps-dependent terms  eps^{(t_i+1)/2} ||f||_{W^{sigma,s}} + eps^{s(r_i-2)/2}.
inline double estimate_bracket(const DataNorms& d, const ProblemParams& pp, const ExponentTable& table, Theorem which,
                               double eps) {
  const int i = theorem_index(which);
  const double r = table.r(i), t = table.t(i);
  const bool p_family = which == Theorem::T1 || which == Theorem::T3b;
  const double e = p_family ? pp.p - 1 : pp.q - 1;
  const double conj = p_family ? d.lp_conj : d.lq_conj;
  double lebesgue = std::pow(d.ls, pp.s);
  if (which == Theorem::T3a) lebesgue = std::pow(d.ls, table.tau);
  if (which == Theorem::T3b) lebesgue = std::pow(d.lrho, table.rho);
  return std::pow(d.fractional, r / e) + std::pow(conj, r / e) + lebesgue + d.ls * d.ls +
         std::pow(eps, 0.5 * (t + 1)) * d.fractional + std::pow(eps, 0.5 * pp.s * (r - 2));
}

struct RatioPoint {
  double eps = 0.0;
  double lhs = 0.0;
  double bracket = 0.0;
  double ratio = 0.0;
};

struct TheoremTrajectory {
  Theorem which = Theorem::T1;
  std::vector<RatioPoint> points;
  double spread = 1.0;  ///< max ratio / min ratio
  bool trivial = false; ///< f = 0 and u = 0 throughout
  CheckResult result;
};

/// Ratio ||u||^{r_i}_{N} / bracket along a continuation sequence; passed when
/// max/min over the sequence is at most `bound`.
inline TheoremTrajectory theorem_ratio(const std::vector<Solution>& sols, const ScalarField& f, const ProblemParams& pp,
                                       const ExponentTable& table, Theorem which, double bound = 10.0) {
  if (!applicable(table, which)) throw InapplicableTheorem(to_string(which) + " is not applicable to these parameters");
  if (sols.empty()) throw ConfigError("empty solution sequence");
  const int i = theorem_index(which);
  const DataNorms d = data_norms(f, pp, table);
  TheoremTrajectory tr;
  tr.which = which;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool all_zero = true;
  for (const Solution& s : sols) {
    RatioPoint pt;
    pt.eps = s.eps;
    pt.lhs = std::pow(nikolskii_norm(s.u, pp, table, i), table.r(i));
    const bool zero_data = d.ls == 0.0;
    pt.bracket = zero_data ? 0.0 : estimate_bracket(d, pp, table, which, s.eps);
    pt.ratio = pt.bracket > 0.0 ? pt.lhs / pt.bracket : 0.0;
    all_zero = all_zero && zero_data && pt.lhs == 0.0;
    if (pt.bracket > 0.0) {
      lo = std::min(lo, pt.ratio);
      hi = std::max(hi, pt.ratio);
    }
    tr.points.push_back(pt);
  }
  tr.trivial = all_zero;
  CheckResult& c = tr.result;
  c = detail::make_result(to_string(which), sols.back().u, sols.back().eps, pp);
  if (tr.trivial) {
    tr.spread = 1.0;
    c.detail = "f = 0: both sides vanish";
    c.passed = true;
    return tr;
  }
  tr.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  c.lhs = tr.spread;
  c.rhs = bound;
  c.margin = bound - tr.spread;
  c.passed = std::isfinite(tr.spread) && tr.spread <= bound;
  c.metrics = {{"ratio_min", lo}, {"ratio_max", hi}, {"ratio_final", tr.points.back().ratio}};
  return tr;
}

/// Largest relative difference |fine - coarse| / |coarse| of the ratios of two
/// trajectories at matching eps; passed when at most `tolerance`.
inline CheckResult check_theorem_stability(const TheoremTrajectory& coarse, const TheoremTrajectory& fine,
                                           double tolerance = 0.25) {
  CheckResult c = fine.result;
  c.name = to_string(fine.which) + "_stability";
  double worst = 0.0;
  std::size_t matched = 0;
  for (const RatioPoint& a : coarse.points) {
    for (const RatioPoint& b : fine.points) {
      if (std::abs(a.eps - b.eps) > 1e-12 * a.eps) continue;
      ++matched;
      const double ref = std::abs(a.ratio);
      if (ref > 0.0) worst = std::max(worst, std::abs(a.ratio - b.ratio) / ref);
    }
  }
  if (matched == 0) throw ConfigError("trajectories share no eps value");
  c.lhs = worst;
  c.rhs = tolerance;
  c.margin = tolerance - worst;
  c.passed = worst <= tolerance;
  c.metrics = {{"matched", static_cast<double>(matched)}, {"coarse_n", static_cast<double>(coarse.result.grid.n)}};
  return c;
}

}  // namespace pqfrac
