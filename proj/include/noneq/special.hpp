#pragma once

namespace noneq {

// Bessel functions of the first kind for any real argument (J0, J2 even; J1 odd).
double bessel_j0(double x);
double bessel_j1(double x);
double bessel_j2(double x);

/// J1(x)/x, with the removable singularity at x = 0 evaluated as 1/2.
double j1_over_x(double x);

}  // namespace noneq
