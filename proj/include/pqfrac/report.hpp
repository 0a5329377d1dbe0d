/// @file report.hpp
/// @brief JSON serialization of check results, solver telemetry and the
///        regularity report. Output carries no timestamps or host data, so
///        identical inputs give identical bytes.
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pqfrac/config.hpp"
#include "pqfrac/constants.hpp"
#include "pqfrac/exponents.hpp"
#include "pqfrac/solver.hpp"
#include "pqfrac/verify.hpp"

namespace pqfrac {

inline constexpr const char* kToolName = "pqfrac";
inline constexpr const char* kToolVersion = "1.0.0";

using Json = nlohmann::ordered_json;

inline Json to_json(const ProblemParams& pp) {
  return Json{{"p", pp.p},         {"q", pp.q}, {"alpha", pp.alpha}, {"beta", pp.beta},
              {"s", pp.s},         {"sigma", pp.sigma}, {"eps", pp.eps}};
}

inline Json to_json(const GridMeta& g) { return Json{{"dim", g.dim}, {"n", g.n}, {"h", g.h}}; }

inline Json to_json(const ExponentTable& t) {
  return Json{{"r1", t.r1},       {"r2", t.r2},       {"r3", t.r3},   {"r4", t.r4},   {"t1", t.t1},
              {"t2", t.t2},       {"t3", t.t3},       {"t4", t.t4},   {"tau", t.tau}, {"rho", t.rho},
              {"thm1", t.thm1},   {"thm2", t.thm2},   {"thm3a", t.thm3a}, {"thm3b", t.thm3b}};
}

inline Json to_json(const CheckResult& c) {
  Json metrics = Json::object();
  for (const auto& [k, v] : c.metrics) metrics[k] = v;
  return Json{{"name", c.name},         {"lhs", c.lhs},       {"rhs", c.rhs},
              {"constant", c.constant}, {"margin", c.margin}, {"passed", c.passed},
              {"grid", to_json(c.grid)}, {"eps", c.eps},      {"params", to_json(c.params)},
              {"detail", c.detail},     {"metrics", metrics}};
}

/// Sidecar of one solver stage.
inline Json solution_sidecar(const Solution& s) {
  return Json{{"eps", s.eps},
              {"residual_norm", s.residual_norm},
              {"iters", s.newton_iters},
              {"energy", s.energy_value},
              {"linear_iters", s.linear_iters}};
}

inline Json to_json(const DataNorms& d, double gagliardo_cutoff) {
  return Json{{"fractional", d.fractional}, {"lp_conj", d.lp_conj},   {"lq_conj", d.lq_conj},
              {"ls", d.ls},                 {"lrho", d.lrho},         {"gagliardo_cutoff", gagliardo_cutoff}};
}

inline Json to_json(const TheoremTrajectory& tr) {
  Json pts = Json::array();
  for (const RatioPoint& p : tr.points)
    pts.push_back(Json{{"eps", p.eps}, {"lhs", p.lhs}, {"bracket", p.bracket}, {"ratio", p.ratio}});
  return Json{{"theorem", to_string(tr.which)}, {"spread", tr.spread}, {"trivial", tr.trivial}, {"points", pts}};
}

inline Json to_json(const SolveConfig& c) {
  return Json{{"eps_schedule", c.eps_schedule},
              {"newton_tol", c.newton_tol},
              {"max_newton_iters", c.max_newton_iters},
              {"linesearch", {{"backtrack", c.linesearch.backtrack}, {"armijo", c.linesearch.armijo}}},
              {"linear_tol", c.linear_tol},
              {"max_linear_iters", c.max_linear_iters}};
}

/// Provenance block: the configuration text as read plus the effective seed.
inline Json config_json(const RunConfig& c) {
  return Json{{"text", c.source},
              {"seed", c.seed},
              {"domain", to_string(c.domain.kind)},
              {"f", c.f},
              {"solver", to_json(c.solve)}};
}

}  // namespace pqfrac
