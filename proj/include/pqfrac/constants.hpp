/// @file constants.hpp
/// @brief Constants pinned from the calibration runs of tools/calibrate.
///
/// Checks compare against these values and never refit them. Re-running the
/// calibration tool must reproduce them; the test suite asserts that.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "pqfrac/numeric.hpp"
#include "pqfrac/verify.hpp"

namespace pqfrac {

struct PinnedConstant {
  double r;
  double value;
};

/// 2 * max of the collinear scan of the vector inequality, per exponent r.
inline constexpr PinnedConstant kLemp4Constants[] = {
    {2.0, 2.0},
    {3.0, 3.9999999999980003},
    {4.0, 7.9999999999920002},
    {6.0, 31.999999999935994},
};

/// 2 * largest boundary ratio |F_t| / bracket on the reference family
/// (interval, f = 2, p=3, q=4, alpha=beta=1, s=2, n=513, t in {0,1,2},
/// eps = 2^-k for k = 0..20).
inline constexpr double kLemb3Constant = 2.8484967108951892;

/// Pinned constant for r when available, otherwise the scan itself.
inline double lemp4_constant(double r) {
  for (const auto& c : kLemp4Constants)
    if (c.r == r) return c.value;
  return calibrate_lemp4(r).constant;
}

/// FNV-1a hash of the pinned values, embedded in every report.
inline std::string constants_hash() {
  std::string canon;
  char buf[64];
  for (const auto& c : kLemp4Constants) {
    std::snprintf(buf, sizeof buf, "lemp4:%.17g=%.17g;", c.r, c.value);
    canon += buf;
  }
  std::snprintf(buf, sizeof buf, "lemb3=%.17g;", kLemb3Constant);
  canon += buf;
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  return buf;
}

}  // namespace pqfrac
