#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "noneq/constants.hpp"
#include "noneq/quadrature.hpp"
#include "noneq/special.hpp"

using namespace noneq;

namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

// J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt. The integrand extends to a smooth periodic
// function, so the composite trapezoid rule converges geometrically.
double bessel_trapezoid(int n, double x) {
  const int m = 400;
  double s = 0;
  for (int i = 0; i <= m; ++i) {
    const double t = constants::pi * i / m;
    const double w = (i == 0 || i == m) ? 0.5 : 1.0;
    s += w * std::cos(n * t - x * std::sin(t));
  }
  return s / m;
}

}  // namespace

TEST_CASE("gk21 integrates polynomials up to degree 31 exactly") {
  for (int k = 0; k <= 31; ++k) {
    auto f = [k](double x) { return scalar(std::pow(x, k)); };
    const auto p = quad::gk21(f, 0.0, 1.0);
    CHECK(p.value(0) == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    // The embedded Gauss rule is exact through degree 19, so the estimate vanishes there.
    if (k <= 19) CHECK(p.error(0) < 1e-14);
  }
}

TEST_CASE("adaptive integration of an oscillatory integrand") {
  auto f = [](double x) {
    Eigen::VectorXd v(2);
    v << std::cos(50 * x), std::sin(50 * x);
    return v;
  };
  quad::Tolerance tol;
  tol.rel = 1e-10;
  tol.abs = 1e-14;
  const auto r = quad::integrate(f, {0.0, 10.0}, tol);
  REQUIRE(r.converged);
  CHECK(r.value(0) == doctest::Approx(std::sin(500.0) / 50).epsilon(1e-10));
  CHECK(r.value(1) == doctest::Approx((1 - std::cos(500.0)) / 50).epsilon(1e-10));
  CHECK(r.evaluations == 21 * (2 * r.panels - 1));
}

TEST_CASE("endpoint square-root singularity converges") {
  auto f = [](double x) { return scalar(1.0 / std::sqrt(x)); };
  const auto r = quad::integrate(f, {0.0, 1.0}, {1e-10, 1e-14, 2000});
  CHECK(r.converged);
  CHECK(r.value(0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("subdivision cap reports non-convergence") {
  auto f = [](double x) { return scalar(std::cos(400 * x)); };
  const auto r = quad::integrate(f, {0.0, 10.0}, {1e-12, 1e-15, 2});
  CHECK_FALSE(r.converged);
  CHECK(r.panels <= 2);
}

TEST_CASE("Bessel functions against the trapezoid oracle") {
  for (double x : {-7.3, -1.0, 0.0, 1e-3, 0.5, 3.0, 12.5, 40.0}) {
    CHECK(bessel_j0(x) == doctest::Approx(bessel_trapezoid(0, x)).epsilon(1e-12));
    CHECK(bessel_j1(x) == doctest::Approx(bessel_trapezoid(1, x)).epsilon(1e-12));
    CHECK(bessel_j2(x) == doctest::Approx(bessel_trapezoid(2, x)).epsilon(1e-12));
  }
  CHECK(bessel_j1(3.0) == doctest::Approx(0.33905895852593).epsilon(1e-12));
}

TEST_CASE("J1(x)/x near the origin") {
  CHECK(j1_over_x(0.0) == 0.5);
  // Taylor series oracle: 1/2 - x^2/16 + x^4/384, truncation below 1e-16 for x <= 1e-2.
  for (double x : {1e-8, 1e-5, 0.99e-4, 1.01e-4, 1e-3, 1e-2}) {
    const double series = 0.5 - x * x / 16 + std::pow(x, 4) / 384;
    CHECK(j1_over_x(x) == doctest::Approx(series).epsilon(1e-14));
  }
  CHECK(j1_over_x(2.5) == doctest::Approx(bessel_trapezoid(1, 2.5) / 2.5).epsilon(1e-12));
}
