/// @file cli.hpp
/// @brief Batch commands behind the pqfrac executable: solve, verify, sweep.
///
/// Exit codes: 0 success, 2 configuration error (including hypothesis
/// violations, inapplicable theorems and empty sweeps), 3 solver failure,
/// 4 failed checks.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "pqfrac/catalog.hpp"
#include "pqfrac/config.hpp"
#include "pqfrac/constants.hpp"
#include "pqfrac/expr.hpp"
#include "pqfrac/norms.hpp"
#include "pqfrac/oracle.hpp"
#include "pqfrac/report.hpp"
#include "pqfrac/solver.hpp"
#include "pqfrac/verify.hpp"

namespace pqfrac {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitChecks = 4 };

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutDirEnv = "PQFRAC_OUT_DIR";

struct CliOptions {
  std::string config_path;
  std::optional<std::string> out_dir;  ///< --out, wins over the environment
  int jobs = 1;                        ///< sweep workers; 0 uses every core
  std::optional<std::uint64_t> seed;   ///< --seed, wins over the config
};

namespace detail {

inline std::filesystem::path output_dir(const CliOptions& o, const RunConfig& c) {
  if (o.out_dir) return *o.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return c.output_dir;
}

/// Parses the config and applies the command-line overrides; reports the
/// error and returns nullopt on failure.
inline std::optional<RunConfig> load(const CliOptions& o, std::ostream& err) {
  try {
    RunConfig c = load_config(o.config_path);
    if (o.seed) c.seed = *o.seed;
    return c;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return std::nullopt;
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  os << text;
}

inline void write_field(const std::filesystem::path& path, const ScalarField& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  write_csv(os, u);
}

inline std::string stage_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "stage_%02zu", k);
  return buf;
}

/// Largest nodal error against the eps = 0 oracle; only for the unit interval.
inline std::optional<double> oracle_error(const RunConfig& c, const ScalarField& u) {
  if (c.domain.kind != DomainKind::Interval || c.domain.lx != 1.0) return std::nullopt;
  try {
    const ScalarField ref = oracle_1d(c.f, c.params).sample(u.grid);
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) worst = std::max(worst, std::abs(u[k] - ref[k]));
    return worst;
  } catch (const RootBracketFailure&) {
    return std::nullopt;
  }
}

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// solve

/// Continuation solve. Each stage is written as stage_KK.csv with a JSON
/// sidecar as soon as it converges; the last one is also written as
/// solution.csv / solution.json.
inline int cmd_solve(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const auto cfg = detail::load(opt, err);
  if (!cfg) return kExitConfig;
  const RunConfig& c = *cfg;
  try {
    const auto dir = detail::output_dir(opt, c);
    std::filesystem::create_directories(dir);
    const GridPtr grid = c.domain.make_grid();
    const ScalarField f = eval_expr(c.f, grid);
    ScalarField start(grid);
    std::optional<Solution> last;
    for (std::size_t k = 0; k < c.solve.eps_schedule.size(); ++k) {
      const double eps = c.solve.eps_schedule[k];
      Solution s = solve_eps(f, c.params, eps, start, c.solve);
      detail::write_field(dir / (detail::stage_name(k) + ".csv"), s.u);
      detail::write_text(dir / (detail::stage_name(k) + ".json"), solution_sidecar(s).dump(2) + "\n");
      out << "eps=" << detail::csv_num(eps) << " residual=" << detail::csv_num(s.residual_norm)
          << " iters=" << s.newton_iters << "\n";
      start = s.u;
      last = std::move(s);
    }
    Json side = solution_sidecar(*last);
    if (const auto e = detail::oracle_error(c, last->u)) {
      side["oracle_max_error"] = *e;
      out << "oracle max error " << detail::csv_num(*e) << "\n";
    }
    detail::write_field(dir / "solution.csv", last->u);
    detail::write_text(dir / "solution.json", side.dump(2) + "\n");
    return kExitOk;
  } catch (const NoConvergence& e) {
    err << "solver error: " << e.what() << " (iterations " << e.iterations() << ", residual "
        << detail::csv_num(e.last_residual()) << ")\n";
    return kExitSolver;
  } catch (const LineSearchStall& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

// ---------------------------------------------------------------------------
// verify

namespace detail {

inline Theorem theorem_from(const std::string& s) {
  if (s == "T1") return Theorem::T1;
  if (s == "T2") return Theorem::T2;
  if (s == "T3a") return Theorem::T3a;
  return Theorem::T3b;
}

inline bool is_theorem(const std::string& s) { return !s.empty() && s[0] == 'T'; }

/// Distinct regularity exponents relevant to the parameters: r1 always,
/// r2..r4 only with beta > 0.
inline std::vector<double> relevant_orders(const ProblemParams& pp, const ExponentTable& t) {
  std::vector<double> out{t.r1};
  if (pp.beta > 0.0)
    for (double r : {t.r2, t.r3, t.r4})
      if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  return out;
}

inline GridPtr coarse_grid(const DomainSpec& d) {
  const int nx = (d.nx - 1) / 2 + 1, ny = (d.ny - 1) / 2 + 1;
  return d.make_grid(nx, ny);
}

inline void tag(CheckResult& c, const char* key, double v) { c.metrics.emplace_back(key, v); }

}  // namespace detail

/// Builds the regularity report for a parsed configuration. Throws on
/// configuration and solver errors.
inline Json build_report(const RunConfig& c) {
  const std::vector<std::string> checks = active_checks(c);
  const std::set<std::string> want(checks.begin(), checks.end());
  const ProblemParams& pp = c.params;
  const ExponentTable table = derive_exponents(pp);
  const GridPtr grid = c.domain.make_grid();
  const double eps = c.check_eps;

  Json report;
  report["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
  report["constants_hash"] = constants_hash();
  report["config"] = config_json(c);
  report["grid"] = Json{{"kind", to_string(c.domain.kind)},
                        {"dim", grid->dim()},
                        {"n", grid->n(0)},
                        {"h", grid->hmin()},
                        {"nodes", grid->size()}};
  report["params"] = to_json(pp);
  report["exponents"] = to_json(table);
  report["checks_requested"] = checks;

  std::vector<CheckResult> results;

  // Identity and inequality checks on seeded catalog fields.
  const bool catalog_needed = want.count("leme1") || want.count("leme2") || want.count("leme3") ||
                              want.count("prope1") || want.count("prope2") || want.count("lemp5");
  Json catalog = Json::array();
  if (catalog_needed) {
    Rng rng(c.seed);
    for (int m = 0; m < c.catalog_count; ++m) {
      const std::string expr = random_catalog_expr(rng, *grid);
      catalog.push_back(expr);
      const ScalarField u = eval_expr(expr, grid);
      auto add = [&](CheckResult r) {
        detail::tag(r, "catalog_field", m);
        results.push_back(std::move(r));
      };
      for (double t : c.identity_t) {
        if (want.count("leme1")) add(check_leme1(u, t, eps, pp));
        if (want.count("leme2")) add(check_leme2(u, t, eps, pp));
      }
      if (want.count("leme3"))
        for (double r : detail::relevant_orders(pp, table)) {
          add(check_leme3(u, r, eps, pp));
          add(check_s_expansion(u, r, eps, pp));
        }
      if (want.count("prope1")) add(check_prope1(u, pp, table, eps));
      if (want.count("prope2")) add(check_prope2(u, pp, table, eps));
      if (want.count("lemp5")) {
        add(check_lemp5(u, table.r1, pp.p, eps, lemp5_constant(table.r1, lemp4_constant(table.r1)), pp));
        if (pp.beta > 0.0)
          add(check_lemp5(u, table.r2, pp.q, eps, lemp5_constant(table.r2, lemp4_constant(table.r2)), pp));
      }
    }
  }
  report["catalog"] = catalog;

  if (want.count("lemp4"))
    for (double r : detail::relevant_orders(pp, table)) results.push_back(check_lemp4(r, c.lemp4_samples, c.seed, lemp4_constant(r)));

  // Checks on solutions.
  bool need_solution = want.count("lemb3") != 0;
  bool need_theorems = false;
  for (const auto& k : checks) need_theorems = need_theorems || detail::is_theorem(k);
  need_solution = need_solution || need_theorems;
  if (need_solution) {
    const ScalarField f = eval_expr(c.f, grid);
    const std::vector<Solution> sols = continuation_solve(f, pp, c.solve);
    Json stages = Json::array();
    for (const Solution& s : sols) stages.push_back(solution_sidecar(s));
    report["solver"] = Json{{"config", to_json(c.solve)}, {"stages", stages}};

    const Solution& fin = sols.back();
    Json un{{"w1p", w1r_norm(fin.u, pp.p)}, {"w1q", w1r_norm(fin.u, pp.q)}};
    for (int i = 1; i <= 4; ++i) un["nikolskii_" + std::to_string(i)] = nikolskii_norm(fin.u, pp, table, i);
    report["solution_norms"] = un;
    report["data_norms"] = to_json(data_norms(f, pp, table), grid->hmin());

    if (want.count("lemb3")) {
      std::vector<double> ts{table.t1};
      if (pp.beta > 0.0 && table.t2 != table.t1) ts.push_back(table.t2);
      for (double t : ts) results.push_back(check_lemb3(fin, f, t, pp, kLemb3Constant));
    }

    if (need_theorems) {
      const GridPtr cg = detail::coarse_grid(c.domain);
      const ScalarField fc = eval_expr(c.f, cg);
      const std::vector<Solution> csols = continuation_solve(fc, pp, c.solve);
      Json trajectories = Json::array();
      for (const auto& k : checks) {
        if (!detail::is_theorem(k)) continue;
        const Theorem th = detail::theorem_from(k);
        TheoremTrajectory fine = theorem_ratio(sols, f, pp, table, th, c.theorem_bound);
        const TheoremTrajectory coarse = theorem_ratio(csols, fc, pp, table, th, c.theorem_bound);
        trajectories.push_back(to_json(fine));
        results.push_back(fine.result);
        results.push_back(check_theorem_stability(coarse, fine, c.stability_tol));
      }
      report["trajectories"] = trajectories;
    }
  }

  Json arr = Json::array();
  Json failed = Json::array();
  for (const CheckResult& r : results) {
    arr.push_back(to_json(r));
    if (!r.passed) failed.push_back(r.name);
  }
  report["checks"] = arr;
  report["summary"] = Json{{"total", results.size()}, {"failed", failed}, {"passed", failed.empty()}};
  return report;
}

/// Runs the configured checks and writes report.json into the output
/// directory.
inline int cmd_verify(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const auto cfg = detail::load(opt, err);
  if (!cfg) return kExitConfig;
  try {
    const Json report = build_report(*cfg);
    const auto dir = detail::output_dir(opt, *cfg);
    std::filesystem::create_directories(dir);
    detail::write_text(dir / "report.json", report.dump(2) + "\n");
    const Json& summary = report["summary"];
    out << "checks: " << summary["total"].get<std::size_t>() << ", failed: " << summary["failed"].size() << "\n";
    if (summary["passed"].get<bool>()) return kExitOk;
    err << "failed checks:";
    std::set<std::string> seen;
    for (const auto& n : summary["failed"])
      if (seen.insert(n.get<std::string>()).second) err << " " << n.get<std::string>();
    err << "\n";
    return kExitChecks;
  } catch (const NoConvergence& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const LineSearchStall& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

// ---------------------------------------------------------------------------
// sweep

struct SweepPoint {
  int n = 0;
  double eps_min = 0.0, f_scale = 1.0, s = 0.0, p = 0.0, q = 0.0;
};

struct SweepRow {
  SweepPoint point;
  std::string status = "ok";
  double residual = NAN;
  int newton_iters = 0;
  double u_w1p = NAN;
  double nik[4] = {NAN, NAN, NAN, NAN};
  double ratio[4] = {NAN, NAN, NAN, NAN};
  double spread[4] = {NAN, NAN, NAN, NAN};
  double oracle_err = NAN;
  double eoc = NAN;
  double h = NAN;
  bool passed = false;
};

inline const char* kSweepHeader =
    "index,n,eps_min,f_scale,s,p,q,residual,newton_iters,u_w1p,nik_1,nik_2,nik_3,nik_4,"
    "ratio_T1,ratio_T2,ratio_T3a,ratio_T3b,spread_T1,spread_T2,spread_T3a,spread_T3b,oracle_err,eoc,status,passed";

/// Cartesian product of the sweep lists; unset lists take the base value.
inline std::vector<SweepPoint> sweep_points(const RunConfig& c) {
  auto or_base = [](const std::vector<double>& v, double base) { return v.empty() ? std::vector<double>{base} : v; };
  const std::vector<int> ns = c.sweep.n.empty() ? std::vector<int>{c.domain.nx} : c.sweep.n;
  std::vector<SweepPoint> out;
  for (double p : or_base(c.sweep.p, c.params.p))
    for (double q : or_base(c.sweep.q, c.params.q))
      for (double s : or_base(c.sweep.s, c.params.s))
        for (double fs : or_base(c.sweep.f_scale, 1.0))
          for (double e : or_base(c.sweep.eps_min, c.eps_min))
            for (int n : ns) out.push_back({n, e, fs, s, p, q});
  return out;
}

inline SweepRow run_sweep_point(const RunConfig& base, const SweepPoint& pt) {
  SweepRow row;
  row.point = pt;
  try {
    ProblemParams pp = base.params;
    pp.p = pt.p;
    pp.q = pt.q;
    pp.s = pt.s;
    validate(pp);
    SolveConfig sc = base.solve;
    if (!base.sweep.eps_min.empty()) sc.eps_schedule = geometric_schedule(pt.eps_min);
    const GridPtr grid = base.domain.make_grid(pt.n, base.sweep.n.empty() ? base.domain.ny : pt.n);
    row.h = grid->hmin();
    ScalarField f = eval_expr(base.f, grid);
    for (double& v : f.values) v *= pt.f_scale;
    const std::vector<Solution> sols = continuation_solve(f, pp, sc);
    const Solution& fin = sols.back();
    row.residual = fin.residual_norm;
    for (const Solution& s : sols) row.newton_iters += s.newton_iters;
    const ExponentTable table = derive_exponents(pp);
    row.u_w1p = w1r_norm(fin.u, pp.p);
    for (int i = 1; i <= 4; ++i) row.nik[i - 1] = nikolskii_norm(fin.u, pp, table, i);
    row.passed = true;
    for (Theorem th : {Theorem::T1, Theorem::T2, Theorem::T3a, Theorem::T3b}) {
      if (!applicable(table, th)) continue;
      const TheoremTrajectory tr = theorem_ratio(sols, f, pp, table, th, base.theorem_bound);
      const int i = theorem_index(th) - 1;
      row.ratio[i] = tr.points.back().ratio;
      row.spread[i] = tr.spread;
      row.passed = row.passed && tr.result.passed;
    }
    if (base.domain.kind == DomainKind::Interval && base.domain.lx == 1.0 && pt.f_scale == 1.0) {
      RunConfig c = base;
      c.params = pp;
      if (const auto e = detail::oracle_error(c, fin.u)) row.oracle_err = *e;
    }
  } catch (const NoConvergence&) {
    row.status = "no_convergence";
    row.passed = false;
  } catch (const HypothesisViolation&) {
    row.status = "hypothesis_violation";
    row.passed = false;
  } catch (const Error&) {
    row.status = "error";
    row.passed = false;
  }
  return row;
}

/// Observed order between consecutive mesh sizes of rows that differ only
/// in n.
inline void fill_eoc(std::vector<SweepRow>& rows) {
  std::map<std::tuple<double, double, double, double, double>, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const SweepPoint& p = rows[k].point;
    groups[{p.eps_min, p.f_scale, p.s, p.p, p.q}].push_back(k);
  }
  for (auto& [key, idx] : groups) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rows[a].point.n < rows[b].point.n; });
    for (std::size_t j = 1; j < idx.size(); ++j) {
      const SweepRow& a = rows[idx[j - 1]];
      SweepRow& b = rows[idx[j]];
      if (a.oracle_err > 0.0 && b.oracle_err > 0.0 && a.h != b.h)
        b.eoc = std::log(a.oracle_err / b.oracle_err) / std::log(a.h / b.h);
    }
  }
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  auto num = [](double v) { return std::isnan(v) ? std::string() : detail::csv_num(v); };
  std::string out = std::string(kSweepHeader) + "\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const SweepRow& r = rows[k];
    out += std::to_string(k) + "," + std::to_string(r.point.n) + "," + num(r.point.eps_min) + "," +
           num(r.point.f_scale) + "," + num(r.point.s) + "," + num(r.point.p) + "," + num(r.point.q) + "," +
           num(r.residual) + "," + std::to_string(r.newton_iters) + "," + num(r.u_w1p);
    for (double v : r.nik) out += "," + num(v);
    for (double v : r.ratio) out += "," + num(v);
    for (double v : r.spread) out += "," + num(v);
    out += "," + num(r.oracle_err) + "," + num(r.eoc) + "," + r.status + "," + (r.passed ? "true" : "false") + "\n";
  }
  return out;
}

/// Runs every sweep point on a pool of opt.jobs workers and writes sweep.csv.
/// Rows keep the enumeration order whatever the worker count.
inline int cmd_sweep(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const auto cfg = detail::load(opt, err);
  if (!cfg) return kExitConfig;
  const RunConfig& c = *cfg;
  if (c.sweep.empty()) {
    err << "config error: the [sweep] section is empty\n";
    return kExitConfig;
  }
  try {
    const std::vector<SweepPoint> points = sweep_points(c);
    std::vector<SweepRow> rows(points.size());
    unsigned jobs = opt.jobs > 0 ? static_cast<unsigned>(opt.jobs) : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(points.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < points.size(); k = next++) rows[k] = run_sweep_point(c, points[k]);
    };
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    fill_eoc(rows);

    const auto dir = detail::output_dir(opt, c);
    std::filesystem::create_directories(dir);
    detail::write_text(dir / "sweep.csv", sweep_csv(rows));
    std::size_t bad = 0;
    for (const SweepRow& r : rows) bad += r.status != "ok";
    out << "rows: " << rows.size() << ", failed: " << bad << "\n";
    if (bad) {
      err << "solver error: " << bad << " sweep point(s) failed\n";
      return kExitSolver;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace pqfrac
