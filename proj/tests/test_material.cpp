#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "noneq/error.hpp"
#include "noneq/material.hpp"

using namespace noneq;

TEST_CASE("SiC permittivity at 0.3 omega_r") {
  const cdouble eps = permittivity(silicon_carbide, 0.3 * silicon_carbide.omega_r);
  CHECK(std::abs(eps.real() / 10.3 - 1) < 0.01);
  CHECK(std::abs(eps.imag() / 0.00721 - 1) < 0.01);
}

TEST_CASE("Drude-Lorentz against direct evaluation") {
  const DrudeLorentzModel m{2.0, 3.0e14, 2.0e14, 1.0e12};
  for (double w : {1e13, 2.0e14, 2.5e14, 5e14}) {
    const cdouble i(0, 1);
    const cdouble ref = 2.0 * (w * w - 9e28 + i * 1e12 * w) / (w * w - 4e28 + i * 1e12 * w);
    CHECK(std::abs(permittivity(m, w) - ref) < 1e-12 * std::abs(ref));
    CHECK(permittivity(m, w).imag() > 0);
  }
}

TEST_CASE("surface resonance") {
  const double ws = surface_resonance(silicon_carbide);
  CHECK(std::abs(ws / 1.787e14 - 1) < 0.005);
  CHECK(std::abs(permittivity(silicon_carbide, ws).real() + 1) < 1e-6);
  CHECK(ws > silicon_carbide.omega_r);
  CHECK(ws < silicon_carbide.omega_l);
}

TEST_CASE("model variants") {
  CHECK(permittivity(PermittivityModel{Vacuum{}}, 1e14) == cdouble(1, 0));
  CHECK(is_vacuum(Vacuum{}));
  CHECK_FALSE(is_vacuum(silicon_carbide));
  const PermittivityModel c = TabulatedConstant{{4.0, 0.1}};
  CHECK(permittivity(c, 1e10) == cdouble(4.0, 0.1));
  CHECK(permittivity(c, 1e15) == cdouble(4.0, 0.1));
}

TEST_CASE("invalid Drude-Lorentz parameters") {
  CHECK_THROWS_AS((DrudeLorentzModel{6.7, 1.0e14, 1.5e14, 1e12}.validate()), DomainError);
  CHECK_THROWS_AS((DrudeLorentzModel{-1.0, 1.8e14, 1.5e14, 1e12}.validate()), DomainError);
  CHECK_THROWS_AS((DrudeLorentzModel{6.7, 1.8e14, 1.5e14, 0.0}.validate()), DomainError);
  CHECK_NOTHROW(silicon_carbide.validate());
}
