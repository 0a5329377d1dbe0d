/// @file catalog.hpp
/// @brief Seeded random generator and random smooth catalog fields.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>

#include "pqfrac/expr.hpp"
#include "pqfrac/grid.hpp"

namespace pqfrac {

/// mt19937_64 with distribution code of our own, so that draws are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0,1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// A random sum of three products of shifted sines, written as a catalog
/// expression with round-trip exact coefficients.
inline std::string random_catalog_expr(Rng& rng, const Grid& g, int terms = 3) {
  std::string e;
  for (int m = 0; m < terms; ++m) {
    const double c = rng.uniform(-1.0, 1.0);
    const int kx = rng.integer(1, 3);
    const double px = rng.uniform();
    std::string term = "(" + detail::num(c) + ")*sinpi(" + std::to_string(kx) + "*x/" + detail::num(g.extent(0)) +
                       "+" + detail::num(px) + ")";
    if (g.dim() == 2) {
      const int ky = rng.integer(1, 3);
      const double py = rng.uniform();
      term += "*sinpi(" + std::to_string(ky) + "*y/" + detail::num(g.extent(1)) + "+" + detail::num(py) + ")";
    }
    e += (m == 0 ? "" : " + ") + term;
  }
  return e;
}

}  // namespace pqfrac
