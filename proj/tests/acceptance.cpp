/// @file acceptance.cpp
/// @brief Acceptance criteria 1-9; prints one PASS/FAIL line per criterion and
///        exits nonzero when any criterion fails.
#include <boost/rational.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "pqfrac/cli.hpp"

using namespace pqfrac;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void note(Outcome& o, bool ok, const std::string& what) {
  o.passed = o.passed && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [fail]");
}

ProblemParams params(double p, double q, double s, double beta = 1.0) {
  ProblemParams pp;
  pp.p = p;
  pp.q = q;
  pp.s = s;
  pp.beta = beta;
  return pp;
}

ScalarField random_zero_trace(Rng& rng, const GridPtr& g) {
  const ScalarField a = eval_expr(random_catalog_expr(rng, *g), g);
  const ScalarField b = eval_expr(g->dim() == 1 ? "sinpi(x)" : "sinpi(x)*sinpi(y)", g);
  ScalarField u(g);
  for (std::size_t k = 0; k < g->size(); ++k) u[k] = a[k] * b[k];
  return u;
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

SolveConfig dyadic_schedule(int kmax) {
  SolveConfig cfg;
  cfg.eps_schedule.clear();
  for (int k = 0; k <= kmax; ++k) cfg.eps_schedule.push_back(std::ldexp(1.0, -k));
  return cfg;
}

Outcome exponent_calculus() {
  using R = boost::rational<long long>;
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(2024);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const R p(rng.integer(17, 64), 8);
    const R q = p + R(rng.integer(0, 32), 8);
    const R s(rng.integer(16, 64), 8);
    const ExponentTable t = derive_exponents(params(boost::rational_cast<double>(p), boost::rational_cast<double>(q),
                                                    boost::rational_cast<double>(s)));
    const R r1 = s * (p - 2) + 2, r2 = s * (q - 2) + 2, r3 = r1 + q - p, r4 = r2 + p - q;
    const R tau = (s * (p - 2) + q - p) / (q - 2), rho = (s * (q - 2) + p - q) / (p - 2);
    const auto eq = [](double a, const R& b) { return a == boost::rational_cast<double>(b); };
    const bool ok = eq(t.r1, r1) && eq(t.r2, r2) && eq(t.r3, r3) && eq(t.r4, r4) && eq(t.t1, r1 - p) &&
                    eq(t.t2, r2 - q) && eq(t.t3, r3 - q) && eq(t.t4, r4 - p) && eq(t.tau, tau) && eq(t.rho, rho) &&
                    t.thm3a == (s >= (q + p - 4) / (p - 2)) && t.thm3b == (p < q && q < p + 1 && (s - 1) * (1 + p - q) >= 1);
    mismatches += !ok;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  note(o, mismatches == 0, std::to_string(mismatches) + " mismatches in 200 triples");
  note(o, secs < 1.0, fmt("%.3f s", secs));
  return o;
}

Outcome solver_vs_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  ProblemParams pp = params(3, 3, 2, 0.0);
  const Oracle1D exact = oracle_1d("const 2", pp);
  note(o, std::abs(exact(0.5) - 1.0 / 3.0) <= 1e-10, fmt("u*(1/2) = %.12f", exact(0.5)));
  std::vector<double> errs;
  for (int n : {257, 513, 1025}) {
    const auto g = Grid::interval(1.0, n);
    const auto sols = continuation_solve(eval_expr("const 2", g), pp, SolveConfig{});
    errs.push_back(max_diff(sols.back().u, exact.sample(g)));
  }
  note(o, errs.back() <= 1e-3, fmt("max error %.3e at n=1025", errs.back()));
  for (std::size_t k = 1; k < errs.size(); ++k) {
    const double eoc = std::log2(errs[k - 1] / errs[k]);
    note(o, eoc >= 1.0, fmt("EOC %.2f", eoc));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  note(o, secs < 30.0, fmt("%.2f s", secs));
  return o;
}

Outcome pq_inversion() {
  Outcome o;
  const ProblemParams pp;
  const double t = invert_monotone_g(1.0, pp);
  note(o, std::abs(t - 0.754878) <= 1e-6, fmt("g^{-1}(1) = %.7f", t));
  const auto g = Grid::interval(1.0, 1025);
  const auto sols = continuation_solve(eval_expr("const 2", g), pp, SolveConfig{});
  const ScalarField& u = sols.back().u;
  const double slope = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * g->h(0));
  note(o, std::abs(slope - t) <= 1e-2, fmt("u'(0) = %.5f", slope));
  return o;
}

Outcome leme1_identity() {
  Outcome o;
  const auto t0 = Clock::now();
  const ProblemParams pp;
  struct Case {
    std::string expr;
    std::vector<GridPtr> grids;
  };
  const std::vector<Case> cases = {
      {"x*(1-x)", {Grid::interval(1.0, 129), Grid::interval(1.0, 257), Grid::interval(1.0, 513)}},
      {"sinpi(x)*sinpi(y)", {Grid::rectangle(1, 1, 33, 33), Grid::rectangle(1, 1, 65, 65), Grid::rectangle(1, 1, 129, 129)}},
  };
  for (const Case& c : cases) {
    for (double t : {0.0, 1.0, 2.0}) {
      double prev = 0.0, rel = 0.0, worst_ratio = 1e300;
      for (const GridPtr& g : c.grids) {
        const CheckResult r = check_leme1(eval_expr(c.expr, g), t, 0.5, pp);
        const double gap = std::abs(r.lhs - r.rhs);
        for (const auto& [k, v] : r.metrics)
          if (k == "relative_gap") rel = v;
        if (prev > 0.0) worst_ratio = std::min(worst_ratio, prev / gap);
        prev = gap;
      }
      const std::string tag = c.expr + " t=" + std::to_string(static_cast<int>(t));
      note(o, rel <= 0.02 && worst_ratio >= 1.8, tag + fmt(" gap %.2e", rel) + fmt(" ratio %.2f", worst_ratio));
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  note(o, secs < 120.0, fmt("%.2f s", secs));
  return o;
}

Outcome inequalities() {
  Outcome o;
  Rng rng(55);
  int failures = 0;
  std::string first;
  for (int trial = 0; trial < 50; ++trial) {
    const double p = rng.uniform(2.2, 5.0), q = p + rng.uniform(0.0, 2.0), s = rng.uniform(2.0, 5.0);
    ProblemParams pp = params(p, q, s, rng.uniform(0.1, 2.0));
    pp.alpha = rng.uniform(0.1, 2.0);
    const ExponentTable tab = derive_exponents(pp);
    const double eps = rng.log_uniform(1e-3, 1.0), t = rng.uniform(0.0, 3.0);
    const GridPtr g = trial % 2 ? Grid::rectangle(1, 1, 65, 65) : Grid::interval(1.0, 257);
    const ScalarField u = random_zero_trace(rng, g);
    std::vector<CheckResult> rs = {check_leme2(u, t, eps, pp), check_prope1(u, pp, tab, eps),
                                   check_prope2(u, pp, tab, eps)};
    for (double r : {tab.r1, tab.r2, tab.r3, tab.r4}) {
      rs.push_back(check_leme3(u, r, eps, pp));
      rs.push_back(check_s_expansion(u, r, eps, pp));
    }
    for (const CheckResult& r : rs)
      if (!r.passed) {
        ++failures;
        if (first.empty()) first = " first: " + r.name + " trial " + std::to_string(trial);
      }
  }
  note(o, failures == 0, std::to_string(failures) + " failures over 50 fields" + first);
  return o;
}

Outcome lemp4_uniformity() {
  Outcome o;
  for (double r : {2.0, 3.0, 4.0, 6.0}) {
    const Lemp4Calibration cal = calibrate_lemp4(r);
    const CheckResult c = check_lemp4(r, 1000000, 6, cal.constant);
    note(o, c.passed, "r=" + std::to_string(static_cast<int>(r)) + fmt(" sup %.4g", c.lhs) + fmt(" <= %.4g", cal.constant));
    note(o, cal.variation <= 0.05, fmt("variation %.1e", cal.variation));
  }
  return o;
}

Outcome norm_oracles() {
  Outcome o;
  const double nik = nikolskii_seminorm(eval_expr("x^2", Grid::interval(1.0, 513)), 4.0);
  const double nik_ref = std::pow(16.0 / 27.0, 0.25);
  note(o, std::abs(nik - nik_ref) <= 0.02 * nik_ref, fmt("Nikolskii %.5f", nik));
  const double g_ref = std::sqrt(8.0 / 3.0);
  double prev = 1e300, err = 0.0;
  bool shrinking = true;
  for (int n : {65, 129, 257}) {
    err = std::abs(gagliardo_seminorm(eval_expr("x", Grid::interval(1.0, n)), 0.75, 2.0) - g_ref);
    shrinking = shrinking && err < prev;
    prev = err;
  }
  note(o, err <= 0.05 * g_ref, fmt("Gagliardo error %.3e", err));
  note(o, shrinking, "error shrinking");
  return o;
}

Outcome theorem_ratios() {
  Outcome o;
  const auto t0 = Clock::now();
  const SolveConfig cfg = dyadic_schedule(20);
  auto trajectories = [&](const ProblemParams& pp, int n, const std::vector<Theorem>& which) {
    const auto g = Grid::interval(1.0, n);
    const ScalarField f = eval_expr("const 2", g);
    const auto sols = continuation_solve(f, pp, cfg);
    std::vector<TheoremTrajectory> out;
    for (Theorem th : which) out.push_back(theorem_ratio(sols, f, pp, derive_exponents(pp), th, 10.0));
    return out;
  };
  const ProblemParams ref = params(3, 4, 2);
  const auto coarse = trajectories(ref, 513, {Theorem::T1, Theorem::T2});
  const auto fine = trajectories(ref, 1025, {Theorem::T1, Theorem::T2});
  for (std::size_t k = 0; k < fine.size(); ++k) {
    const std::string name = to_string(fine[k].which);
    const auto& m = fine[k].result.metrics;
    note(o, fine[k].result.passed,
         name + fmt(" spread %.3g", fine[k].spread) + fmt(" ratios in [%.3g", m[0].second) + fmt(", %.3g]", m[1].second));
    const CheckResult st = check_theorem_stability(coarse[k], fine[k], 0.25);
    note(o, st.passed, name + fmt(" stability %.2e", st.lhs));
  }
  const auto t3 = trajectories(params(3, 4, 3), 1025, {Theorem::T3a});
  note(o, t3[0].result.passed, fmt("T3a (s=3) spread %.3g", t3[0].spread));
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  note(o, secs < 600.0, fmt("%.1f s", secs));
  return o;
}

Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pqfrac_acceptance";
  fs::remove_all(dir);
  std::string bytes[2];
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    CliOptions opt;
    opt.config_path = std::string(PQFRAC_SOURCE_DIR) + "/configs/reference_1d.toml";
    opt.out_dir = (dir / std::to_string(k)).string();
    std::ostringstream out, err;
    codes[k] = cmd_verify(opt, out, err);
    std::ifstream in(dir / std::to_string(k) / "report.json", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    bytes[k] = ss.str();
  }
  fs::remove_all(dir);
  note(o, !bytes[0].empty() && bytes[0] == bytes[1], std::to_string(bytes[0].size()) + " bytes identical");
  note(o, codes[0] == codes[1], "exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exponent calculus", exponent_calculus},
      {"solver vs 1D oracle", solver_vs_oracle},
      {"(p,q) oracle inversion", pq_inversion},
      {"leme1 identity", leme1_identity},
      {"leme2/leme3/prope1/prope2", inequalities},
      {"lemp4 eps-uniformity", lemp4_uniformity},
      {"norm oracles", norm_oracles},
      {"theorem-ratio boundedness", theorem_ratios},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("criterion %zu %s: %s (%s)\n", k + 1, criteria[k].first, o.passed ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
