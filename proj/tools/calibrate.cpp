/// @file calibrate.cpp
/// @brief Recomputes the pinned constants and prints them in the layout of
///        include/pqfrac/constants.hpp.
#include <cstdio>

#include "pqfrac/verify.hpp"

int main() {
  using namespace pqfrac;
  std::printf("// lemp4: 2 * max of the collinear scan over the eps set\n");
  for (double r : {2.0, 3.0, 4.0, 6.0}) {
    const Lemp4Calibration c = calibrate_lemp4(r);
    std::printf("r=%g constant=%.17g variation=%.3e\n", r, c.constant, c.variation);
  }
  const double worst = calibrate_lemb3();
  std::printf("lemb3 max_ratio=%.17g constant=%.17g\n", worst, 2.0 * worst);
  return 0;
}
