#include "noneq/scattering.hpp"

#include <cmath>

#include "noneq/constants.hpp"
#include "noneq/error.hpp"

namespace noneq {

namespace {

constexpr double kResonanceFloor = 1e-14;

cdouble check_denominator(cdouble den) {
  if (std::abs(den) < kResonanceFloor) {
    throw ResonanceError("slab denominator vanishes: guided-mode pole on the integration path");
  }
  return den;
}

}  // namespace

cdouble causal_sqrt(cdouble z) {
  cdouble r = std::sqrt(z);
  if (r.imag() < 0 || (r.imag() == 0 && r.real() < 0)) r = -r;
  return r;
}

ModeKinematics mode_kinematics(double omega, double k, cdouble eps) {
  if (!(omega > 0)) throw DomainError("mode_kinematics: omega must be > 0");
  if (!(k >= 0)) throw DomainError("mode_kinematics: k must be >= 0");
  const double k0 = omega / constants::c;
  const double kz2 = k0 * k0 - k * k;
  ModeKinematics kin;
  kin.omega = omega;
  kin.k = k;
  if (kz2 >= 0) {
    kin.kz = {std::sqrt(kz2), 0.0};
    kin.sector = Sector::Propagative;
  } else {
    kin.kz = {0.0, std::sqrt(-kz2)};
    kin.sector = Sector::Evanescent;
  }
  kin.kzm = causal_sqrt(eps * k0 * k0 - k * k);
  return kin;
}

ModeKinematics mode_kinematics_normalized(cdouble kz, cdouble eps) {
  ModeKinematics kin;
  kin.omega = constants::c;
  kin.kz = kz;
  kin.sector = kz.imag() > 0 ? Sector::Evanescent : Sector::Propagative;
  const double k2 = 1.0 - (kz * kz).real();
  kin.k = std::sqrt(std::max(k2, 0.0));
  kin.kzm = causal_sqrt(eps - 1.0 + kz * kz);
  return kin;
}

cdouble fresnel_r(Polarization p, const ModeKinematics& kin, cdouble eps) {
  if (p == Polarization::TE) return (kin.kz - kin.kzm) / (kin.kz + kin.kzm);
  return (eps * kin.kz - kin.kzm) / (eps * kin.kz + kin.kzm);
}

cdouble fresnel_t(Polarization p, const ModeKinematics& kin, cdouble eps) {
  if (p == Polarization::TE) return 2.0 * kin.kz / (kin.kz + kin.kzm);
  return 2.0 * causal_sqrt(eps) * kin.kz / (eps * kin.kz + kin.kzm);
}

cdouble fresnel_tbar(Polarization p, const ModeKinematics& kin, cdouble eps) {
  if (p == Polarization::TE) return 2.0 * kin.kzm / (kin.kz + kin.kzm);
  return 2.0 * causal_sqrt(eps) * kin.kzm / (eps * kin.kz + kin.kzm);
}

cdouble slab_denominator(Polarization p, const ModeKinematics& kin, cdouble eps,
                         const SlabGeometry& geom) {
  const cdouble r = fresnel_r(p, kin, eps);
  const cdouble phase = std::exp(cdouble{0.0, 2.0} * kin.kzm * geom.thickness);
  return 1.0 - r * r * phase;
}

SlabResponse slab_response(Polarization p, const ModeKinematics& kin, cdouble eps,
                           const SlabGeometry& geom) {
  if (!(geom.thickness > 0) || !std::isfinite(geom.thickness)) {
    throw DomainError("slab thickness must be positive and finite");
  }
  const cdouble I{0.0, 1.0};
  const cdouble r = fresnel_r(p, kin, eps);
  const cdouble round_trip = std::exp(2.0 * I * kin.kzm * geom.thickness);
  const cdouble den = check_denominator(1.0 - r * r * round_trip);
  SlabResponse out;
  out.rho = r * (1.0 - round_trip) / den;
  out.tau = fresnel_t(p, kin, eps) * fresnel_tbar(p, kin, eps) *
            std::exp(I * (kin.kzm - kin.kz) * geom.thickness) / den;
  return out;
}

cdouble slab_rho(Polarization p, const ModeKinematics& kin, cdouble eps, const SlabGeometry& geom) {
  return slab_response(p, kin, eps, geom).rho;
}

cdouble slab_tau(Polarization p, const ModeKinematics& kin, cdouble eps, const SlabGeometry& geom) {
  return slab_response(p, kin, eps, geom).tau;
}

}  // namespace noneq
