#include "noneq/special.hpp"

#include <cmath>

namespace noneq {

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

double bessel_j1(double x) {
  const double v = std::cyl_bessel_j(1.0, std::abs(x));
  return x < 0 ? -v : v;
}

double bessel_j2(double x) { return std::cyl_bessel_j(2.0, std::abs(x)); }

double j1_over_x(double x) {
  const double a = std::abs(x);
  if (a < 1e-4) {
    const double x2 = a * a;
    return 0.5 - x2 / 16.0 + x2 * x2 / 384.0;
  }
  return std::cyl_bessel_j(1.0, a) / a;
}

}  // namespace noneq
