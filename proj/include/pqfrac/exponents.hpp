/// @file exponents.hpp
/// @brief Problem parameters, hypothesis validation and the regularity
///        exponent calculus (r_i, t_i, tau, rho and theorem applicability).
#pragma once

#include <string>
#include <vector>

#include "pqfrac/error.hpp"

namespace pqfrac {

/// Parameters of  -alpha Delta_p u - beta Delta_q u = f,  f in W^{sigma,s},
/// together with the regularization level eps.
struct ProblemParams {
  double p = 3.0;
  double q = 4.0;
  double alpha = 1.0;
  double beta = 1.0;
  double s = 2.0;
  double sigma = 0.75;
  double eps = 1.0;

  ProblemParams with_eps(double e) const {
    ProblemParams c = *this;
    c.eps = e;
    return c;
  }
};

/// Collects every failed hypothesis; empty when the parameters are admissible.
inline std::vector<Violation> hypothesis_violations(const ProblemParams& pp) {
  std::vector<Violation> v;
  if (!(pp.p > 2.0)) v.push_back({"p", "p>2"});
  if (!(pp.q >= pp.p)) v.push_back({"q", "q>=p"});
  if (!(pp.alpha > 0.0)) v.push_back({"alpha", "alpha>0"});
  if (!(pp.beta >= 0.0)) v.push_back({"beta", "beta>=0"});
  if (!(pp.s >= 2.0)) v.push_back({"s", "s>=2"});
  if (!(pp.sigma * pp.s > 1.0)) v.push_back({"sigma", "sigma>1/s"});
  if (!(pp.eps > 0.0 && pp.eps <= 1.0)) v.push_back({"eps", "eps in (0,1]"});
  return v;
}

/// Returns the parameters unchanged, or throws HypothesisViolation listing
/// every failed condition.
inline const ProblemParams& validate(const ProblemParams& pp) {
  auto v = hypothesis_violations(pp);
  if (!v.empty()) throw HypothesisViolation(std::move(v));
  return pp;
}

struct ExponentTable {
  double r1 = 0, r2 = 0, r3 = 0, r4 = 0;
  double t1 = 0, t2 = 0, t3 = 0, t4 = 0;
  double tau = 0, rho = 0;
  bool thm1 = true;
  bool thm2 = false;
  bool thm3a = false;
  bool thm3b = false;

  double r(int i) const {
    switch (i) {
      case 1: return r1;
      case 2: return r2;
      case 3: return r3;
      default: return r4;
    }
  }
  double t(int i) const {
    switch (i) {
      case 1: return t1;
      case 2: return t2;
      case 3: return t3;
      default: return t4;
    }
  }
};

/// Exponent table for validated parameters.
///
/// Sums are formed in long double. tau and rho are the double quotient of the
/// rounded numerator and denominator, so for dyadic inputs every entry is the
/// correctly rounded exact value. Threshold flags are decided by
/// cross-multiplied comparisons with no tolerance.
inline ExponentTable derive_exponents(const ProblemParams& pp) {
  using ld = long double;
  const ld p = pp.p, q = pp.q, s = pp.s;
  ExponentTable e;
  const ld r1 = s * (p - 2) + 2;
  const ld r2 = s * (q - 2) + 2;
  const ld r3 = s * (p - 2) + 2 + (q - p);
  const ld r4 = s * (q - 2) + 2 + (p - q);
  e.r1 = static_cast<double>(r1);
  e.r2 = static_cast<double>(r2);
  e.r3 = static_cast<double>(r3);
  e.r4 = static_cast<double>(r4);
  e.t1 = static_cast<double>(r1 - p);
  e.t2 = static_cast<double>(r2 - q);
  e.t3 = static_cast<double>(r3 - q);
  e.t4 = static_cast<double>(r4 - p);

  const double tau_num = static_cast<double>(s * (p - 2) + (q - p));
  const double tau_den = static_cast<double>(q - 2);
  const double rho_num = static_cast<double>(s * (q - 2) + (p - q));
  const double rho_den = static_cast<double>(p - 2);
  e.tau = tau_num / tau_den;
  e.rho = rho_num / rho_den;

  const bool coupled = pp.beta > 0.0;
  e.thm1 = true;
  e.thm2 = coupled;
  // s >= (q+p-4)/(p-2)  <=>  s(p-2) >= q+p-4  since p > 2
  e.thm3a = coupled && s * (p - 2) >= q + p - 4;
  // p<q<p+1 and s >= 1 + 1/(1+p-q)  <=>  (s-1)(1+p-q) >= 1
  e.thm3b = coupled && p < q && q < p + 1 && (s - 1) * (1 + p - q) >= 1;
  return e;
}

}  // namespace pqfrac
