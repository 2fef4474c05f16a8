#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "noneq/correlators.hpp"
#include "noneq/error.hpp"
#include "noneq/constants.hpp"

using namespace noneq;

namespace {

const double kOmega = 0.3 * silicon_carbide.omega_r;
const double kK0 = kOmega / 299792458.0;

// Vacuum dipole-dipole correlation written out from the radiating dipole field.
double par_oracle(double r) { return 3.0 * (std::sin(r) / (r * r * r) - std::cos(r) / (r * r)); }
double perp_oracle(double r) {
  return 1.5 * (std::sin(r) / r + std::cos(r) / (r * r) - std::sin(r) / (r * r * r));
}

QuadratureSettings tight() {
  QuadratureSettings q;
  q.rel_tol = 1e-9;
  q.abs_tol = 1e-13;
  return q;
}

const SlabInputs kVacuum{Vacuum{}, {1e-8}};
const SlabInputs kSiC{silicon_carbide, {0.01e-6}};

double rel(cdouble a, double b, double floor) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

}  // namespace

TEST_CASE("small-argument angular integrals") {
  const cdouble kz = std::sqrt(1.0 - 0.36);
  const Matrix3c te = angular_integrals_normalized(Polarization::TE, 0.6, kz, 1e-9, 1, 1);
  CHECK(std::abs(te(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(te(1, 1) - 1.0) < 1e-12);
  const Matrix3c tm = angular_integrals_normalized(Polarization::TM, 0.6, kz, 1e-9, 1, 1);
  CHECK(std::abs(tm(2, 2) - 2.0 * 0.36) < 1e-12);
  CHECK(std::abs(tm(0, 2)) < 1e-8);
  CHECK(std::abs(tm(2, 0)) < 1e-8);
}

TEST_CASE("TE angular integral at k r = 3") {
  // J1(3) from its integral representation (1/pi) int_0^pi cos(t - 3 sin t) dt, trapezoid rule.
  const int n = 2000;
  double j1 = 0;
  for (int i = 0; i <= n; ++i) {
    const double t = constants::pi * i / n;
    j1 += (i == 0 || i == n ? 0.5 : 1.0) * std::cos(t - 3.0 * std::sin(t));
  }
  j1 /= n;
  CHECK(j1 == doctest::Approx(0.33906).epsilon(1e-4));
  const cdouble kz = std::sqrt(1.0 - 0.25);
  const Matrix3c te = angular_integrals_normalized(Polarization::TE, 0.5, kz, 6.0, 1, 1);
  CHECK(std::abs(te(0, 0) - 2.0 * j1 / 3.0) < 1e-10);
  CHECK(std::abs(te(0, 0) - 0.22602) < 1e-4);
}

TEST_CASE("free-space closed form") {
  CHECK(free_space_alpha_parallel(constants::pi) ==
        doctest::Approx(3.0 / (constants::pi * constants::pi)).epsilon(1e-13));
  for (double r : {1e-4, 1e-3}) {
    CHECK(free_space_alpha_parallel(r) == doctest::Approx(1.0 - r * r / 10).epsilon(1e-9));
    CHECK(free_space_alpha_perpendicular(r) == doctest::Approx(1.0 - r * r / 5).epsilon(1e-9));
  }
  for (double r : {0.3, 2.0, 7.5}) {
    CHECK(free_space_alpha_parallel(r) == doctest::Approx(par_oracle(r)).epsilon(1e-12));
    CHECK(free_space_alpha_perpendicular(r) == doctest::Approx(perp_oracle(r)).epsilon(1e-12));
  }
  CHECK(std::abs(free_space_alpha_parallel(1e4)) < 1e-7);
  CHECK(std::abs(free_space_alpha_perpendicular(1e4)) < 2e-4);
  const auto m = free_space_alpha(kOmega, Vector3d(0, 0, 2.0 / kK0));
  CHECK(m(2, 2) == doctest::Approx(par_oracle(2.0)).epsilon(1e-12));
  CHECK(m(0, 0) == doctest::Approx(perp_oracle(2.0)).epsilon(1e-12));
  CHECK(std::abs(m(0, 2)) < 1e-15);
}

TEST_CASE("vacuum quadrature matches the closed form at seven separations") {
  const auto q = tight();
  for (double r : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
    CAPTURE(r);
    const auto set = compute_correlators(kOmega, {1e-6, 1e-6, r / kK0}, kVacuum, q);
    const auto a = set.alpha({1, 2});
    const double par = par_oracle(r), perp = perp_oracle(r);
    const double floor = 1e-3 * std::max(std::abs(par), std::abs(perp));
    CHECK(rel(a.alpha_W(0, 0), par, floor) < 1e-6);
    CHECK(rel(a.alpha_W(1, 1), perp, floor) < 1e-6);
    CHECK(rel(a.alpha_W(2, 2), perp, floor) < 1e-6);
    CHECK(a.alpha_M.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(a.alpha_W(0, 1)) < 1e-9);
  }
}

TEST_CASE("vertical separation in vacuum") {
  const double r = 1.7;
  const auto a = alpha_pair({1, 2}, kOmega, {1e-6, 1e-6 + r / kK0, 0.0}, kVacuum, tight());
  CHECK(rel(a.alpha_W(2, 2), par_oracle(r), 1e-3) < 1e-6);
  CHECK(rel(a.alpha_W(0, 0), perp_oracle(r), 1e-3) < 1e-6);
  CHECK(rel(a.alpha_W(1, 1), perp_oracle(r), 1e-3) < 1e-6);
}

TEST_CASE("single emitter in vacuum") {
  const auto in = integral_ABCD({1, 1}, kOmega, {1e-6, 1e-6, 0.0}, kVacuum, tight());
  CHECK((in.A - Matrix3c::Identity()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((in.B - in.A).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(in.C.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(in.D.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(in.C2.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(in.D2.cwiseAbs().maxCoeff() < 1e-14);
  const auto a = alpha_from_integrals(in, {1, 1}, kOmega);
  CHECK((a.alpha_W - in.A).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(a.alpha_M.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("alpha assembly from integrals") {
  PairIntegrals in;
  std::mt19937 gen(3);
  std::normal_distribution<double> g;
  auto rnd = [&] {
    Matrix3c m;
    for (int i = 0; i < 9; ++i) m(i) = {g(gen), g(gen)};
    return m;
  };
  in.A = rnd();
  in.B = rnd();
  in.C = rnd();
  in.D = rnd();
  in.C2 = rnd();
  in.D2 = rnd();
  const auto a = alpha_from_integrals(in, {1, 2}, kOmega);
  CHECK((a.alpha_W - 0.5 * (in.A.conjugate() + in.B + 2.0 * in.C)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((a.alpha_M - 0.5 * (in.A - in.B + 2.0 * in.D)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("SiC slab properties") {
  const auto q = tight();
  const EmitterGeometry base{1.04e-6, 1.28e-6, 0.25e-6};
  const auto set = compute_correlators(kOmega, base, kSiC, q);

  SUBCASE("pair symmetry") {
    const auto a12 = set.alpha({1, 2});
    const auto a21 = set.alpha({2, 1});
    const double scale = a12.alpha_W.cwiseAbs().maxCoeff() + a12.alpha_M.cwiseAbs().maxCoeff();
    CHECK((a12.alpha_W - a21.alpha_W.adjoint()).cwiseAbs().maxCoeff() < 1e-7 * scale);
    CHECK((a12.alpha_M - a21.alpha_M.adjoint()).cwiseAbs().maxCoeff() < 1e-7 * scale);
  }

  SUBCASE("realness of the total correlation") {
    for (EmitterPair p : {EmitterPair{1, 1}, EmitterPair{2, 2}, EmitterPair{1, 2}, EmitterPair{2, 1}}) {
      const auto a = set.alpha(p);
      const Matrix3c tot = a.alpha_W + a.alpha_M;
      CHECK(tot.imag().cwiseAbs().maxCoeff() < 10 * q.rel_tol * tot.cwiseAbs().maxCoeff());
    }
  }

  SUBCASE("contracted rate matrix is positive semidefinite") {
    std::mt19937 gen(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
      Vector3c d1, d2;
      for (int i = 0; i < 3; ++i) {
        d1(i) = {g(gen), g(gen)};
        d2(i) = {g(gen), g(gen)};
      }
      d1.normalize();
      d2.normalize();
      const Vector3c* d[2] = {&d1, &d2};
      Matrix2c m;
      for (int qq = 0; qq < 2; ++qq) {
        for (int qp = 0; qp < 2; ++qp) {
          const auto a = set.alpha({qq + 1, qp + 1});
          m(qq, qp) = d[qq]->dot((a.alpha_W + a.alpha_M) * *d[qp]);
        }
      }
      CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-7 * m.cwiseAbs().maxCoeff());
      const Eigen::SelfAdjointEigenSolver<Matrix2c> es(0.5 * (m + m.adjoint()));
      CHECK(es.eigenvalues().minCoeff() > -1e-7 * es.eigenvalues().maxCoeff());
    }
  }

  SUBCASE("slab contributions vanish for vacuum and thin slabs") {
    const auto c2d2 = integral_C2D2({1, 2}, kOmega, base, kVacuum, q);
    CHECK(c2d2.first.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(c2d2.second.cwiseAbs().maxCoeff() < 1e-14);
    const auto thick = integral_C2D2({1, 2}, kOmega, base, kSiC, q);
    const auto thin = integral_C2D2({1, 2}, kOmega, base, SlabInputs{silicon_carbide, {1e-12}}, q);
    CHECK(thin.first.cwiseAbs().maxCoeff() < 1e-3 * thick.first.cwiseAbs().maxCoeff());
    CHECK(thin.second.cwiseAbs().maxCoeff() < 1e-3 * thick.second.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("cross correlations decay with separation") {
  const auto q = tight();
  // Largest entry over one free-space wavelength starting at reduced separation x0, so that
  // oscillation nodes do not decide the comparison.
  auto envelope = [&](double x0, bool vertical) {
    double m = 0;
    for (int i = 0; i < 8; ++i) {
      const double x = (x0 + 2 * constants::pi * i / 8) / kK0;
      const EmitterGeometry g = vertical ? EmitterGeometry{1e-6, 1e-6 + x, 0.0}
                                         : EmitterGeometry{1.04e-6, 1.04e-6, x};
      const auto a = alpha_pair({1, 2}, kOmega, g, kSiC, q);
      m = std::max({m, a.alpha_W.cwiseAbs().maxCoeff(), a.alpha_M.cwiseAbs().maxCoeff()});
    }
    return m;
  };
  CHECK(envelope(50.0, false) < 0.2 * envelope(5.0, false));
  CHECK(envelope(50.0, true) < 0.2 * envelope(5.0, true));
}

TEST_CASE("evanescent integral decays with height") {
  // The thin slab carries a weakly bound mode just beyond the light line, so the decay only
  // sets in at heights of order a millimetre.
  QuadratureSettings q;
  q.max_subdivisions = 200000;
  auto d_size = [&](double z) {
    return integral_ABCD({1, 1}, kOmega, {z, z, 0.0}, kSiC, q).D.cwiseAbs().maxCoeff();
  };
  CHECK(d_size(1e-2) < 0.2 * d_size(1e-3));
  auto d2_size = [&](double z) {
    return integral_C2D2({1, 1}, kOmega, {z, z, 0.0}, kSiC, q).second.cwiseAbs().maxCoeff();
  };
  CHECK(d2_size(1e-2) < 0.2 * d2_size(1e-3));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS((EmitterGeometry{-1e-6, 1e-6, 0}.validate()), DomainError);
  CHECK_THROWS_AS((EmitterGeometry{1e-6, 1e-6, -1e-7}.validate()), DomainError);
  QuadratureSettings q;
  q.rel_tol = 0;
  CHECK_THROWS_AS(q.validate(), DomainError);
  q = QuadratureSettings{};
  q.max_subdivisions = 0;
  CHECK_THROWS_AS(q.validate(), DomainError);
}

TEST_CASE("subdivision cap raises QuadratureError") {
  QuadratureSettings q;
  q.rel_tol = 1e-14;
  q.abs_tol = 1e-30;
  q.max_subdivisions = 2;
  CHECK_THROWS_AS(compute_correlators(kOmega, {1.04e-6, 1.28e-6, 5e-6}, kSiC, q), QuadratureError);
}
