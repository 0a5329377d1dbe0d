/// @file oracle.hpp
/// @brief Exact solutions of the one-dimensional problem on (0,1), computed by
///        quadrature and monotone scalar inversion.
///
/// With g(t) = alpha (t^2+eps)^{(p-2)/2} t + beta (t^2+eps)^{(q-2)/2} t, the
/// equation -(g(u'))' = f integrates to g(u'(x)) = c - F(x) with
/// F(x) = int_0^x f. The constant c is fixed by u(1) = 0.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "pqfrac/error.hpp"
#include "pqfrac/exponents.hpp"
#include "pqfrac/expr.hpp"
#include "pqfrac/field.hpp"

namespace pqfrac {

/// g(t) for the parameters and regularization eps (eps = 0 is allowed).
inline double monotone_g(double t, const ProblemParams& pp, double eps = 0.0) {
  const double w = t * t + eps;
  double d = pp.alpha * std::pow(w, 0.5 * (pp.p - 2));
  if (pp.beta != 0.0) d += pp.beta * std::pow(w, 0.5 * (pp.q - 2));
  return d * t;
}

/// Solves g(t) = y. g is odd and strictly increasing; the bracket
/// [0, 1 + |y|^{1/(p-1)} / max(alpha,1)] is doubled until it holds the root and
/// then shrunk by TOMS 748 to full double precision.
inline double invert_monotone_g(double y, const ProblemParams& pp, double eps = 0.0) {
  if (y == 0.0) return 0.0;
  const double ay = std::abs(y);
  auto h = [&](double t) { return monotone_g(t, pp, eps) - ay; };
  double hi = 1.0 + std::pow(ay, 1.0 / (pp.p - 1)) / std::max(pp.alpha, 1.0);
  double fhi = h(hi);
  while (fhi < 0.0) fhi = h(hi *= 2.0);
  if (fhi == 0.0) return std::copysign(hi, y);
  std::uintmax_t iters = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits);
  const auto r = boost::math::tools::toms748_solve(h, 0.0, hi, -ay, fhi, tol, iters);
  const double t = std::abs(h(r.first)) <= std::abs(h(r.second)) ? r.first : r.second;
  return std::copysign(t, y);
}

/// Exact solution sampler u*(x), u*'(x) on (0,1).
///
/// u*' = g^{-1}(c - F) is only Hoelder continuous where c - F changes sign, so
/// those points are located first and every integral is split there and
/// evaluated by tanh-sinh quadrature.
class Oracle1D {
 public:
  Oracle1D(Expr f, const ProblemParams& pp, double eps = 0.0)
      : f_(std::move(f)), pp_(pp), eps_(eps), ts_(std::make_shared<boost::math::quadrature::tanh_sinh<double>>()) {
    if (!(eps >= 0.0)) throw ConfigError("oracle eps must be nonnegative");
    F_.resize(kSamples + 1);
    for (int j = 0; j <= kSamples; ++j) F_[j] = load_primitive(static_cast<double>(j) / kSamples);
    find_constant();
  }

  double constant() const noexcept { return c_; }

  /// F(x) = int_0^x f.
  double load_primitive(double x) const {
    if (x == 0.0) return 0.0;
    return boost::math::quadrature::gauss<double, 30>::integrate([this](double t) { return f_({t, 0.0}); }, 0.0, x);
  }

  double derivative(double x) const { return invert_monotone_g(c_ - load_primitive(x), pp_, eps_); }

  double operator()(double x) const { return integral(0.0, x); }

  /// u* at every node of a 1D grid, integrating cumulatively between nodes.
  ScalarField sample(const GridPtr& grid) const {
    if (grid->dim() != 1) throw DegenerateGrid("the 1D oracle needs an interval grid");
    ScalarField u(grid);
    double acc = 0.0;
    for (int i = 1; i < grid->n(); ++i) {
      acc += integral(grid->coord(grid->index(i - 1))[0], grid->coord(grid->index(i))[0]);
      u[grid->index(i)] = acc;
    }
    u[grid->index(grid->n() - 1)] = 0.0;
    return u;
  }

 private:
  static constexpr int kSamples = 2048;

  // Sign changes of c - F on (0,1) for the current constant.
  void locate_breaks() {
    breaks_.clear();
    auto h = [this](double x) { return c_ - load_primitive(x); };
    for (int j = 0; j < kSamples; ++j) {
      const double a = c_ - F_[j], b = c_ - F_[j + 1];
      const double xa = static_cast<double>(j) / kSamples, xb = static_cast<double>(j + 1) / kSamples;
      if (a == 0.0) {
        if (j > 0) breaks_.push_back(xa);
        continue;
      }
      if (a * b >= 0.0) continue;
      std::uintmax_t iters = 100;
      const auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
      const auto r = boost::math::tools::toms748_solve(h, xa, xb, a, b, tol, iters);
      breaks_.push_back(0.5 * (r.first + r.second));
    }
  }

  double piece(double a, double b) const {
    if (a >= b) return 0.0;
    auto du = [this](double x) { return derivative(x); };
    if (b - a < 1e-8) return boost::math::quadrature::gauss<double, 20>::integrate(du, a, b);
    double gap = 1.0;
    for (double x : breaks_) gap = std::min(gap, std::min(std::abs(x - a), std::abs(x - b)));
    if (gap > 4 * (b - a)) return boost::math::quadrature::gauss<double, 30>::integrate(du, a, b);
    return ts_->integrate(du, a, b, 1e-14);
  }

  double integral(double a, double b) const {
    if (a == b) return 0.0;
    if (a > b) return -integral(b, a);
    double total = 0.0, lo = a;
    for (double x : breaks_) {
      if (x <= lo || x >= b) continue;
      total += piece(lo, x);
      lo = x;
    }
    return total + piece(lo, b);
  }

  double mean_slope(double c) {
    c_ = c;
    locate_breaks();
    return integral(0.0, 1.0);
  }

  void find_constant() {
    double M = 0.0;
    for (double v : F_) M = std::max(M, std::abs(v));
    if (!std::isfinite(M)) throw RootBracketFailure("load primitive is not finite");
    if (M == 0.0) {
      c_ = 0.0;
      breaks_.clear();
      return;
    }
    M = 1.05 * M;
    const double lo = mean_slope(-M), hi = mean_slope(M);
    if (lo == 0.0 || hi == 0.0) {
      mean_slope(lo == 0.0 ? -M : M);
      return;
    }
    if (lo * hi > 0.0) throw RootBracketFailure("no sign change of the mean slope in [-M, M]");
    std::uintmax_t iters = 200;
    const auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 3);
    const auto r = boost::math::tools::toms748_solve([this](double c) { return mean_slope(c); }, -M, M, lo, hi, tol,
                                                     iters);
    mean_slope(0.5 * (r.first + r.second));
  }

  Expr f_;
  ProblemParams pp_;
  double eps_;
  std::shared_ptr<boost::math::quadrature::tanh_sinh<double>> ts_;
  std::vector<double> F_;
  std::vector<double> breaks_;
  double c_ = 0.0;
};

/// Oracle for a catalog expression.
inline Oracle1D oracle_1d(std::string_view f, const ProblemParams& pp, double eps = 0.0) {
  return Oracle1D(parse_expr(f), pp, eps);
}

}  // namespace pqfrac
