#pragma once

#include "noneq/types.hpp"

namespace noneq {

enum class Polarization { TE = 1, TM = 2 };
enum class Sector { Propagative, Evanescent };

struct SlabGeometry {
  double thickness;  // m
};

/// Longitudinal wavenumbers of a mode with transverse wavenumber k at frequency omega.
///
/// kz = sqrt(w^2/c^2 - k^2) in vacuum and kzm = sqrt(eps w^2/c^2 - k^2) in the slab, both
/// on the branch Im >= 0 (Re >= 0 when the imaginary part vanishes).
///
/// The Fresnel and slab functions below only use ratios of wavenumbers and the products
/// kzm * thickness, so a ModeKinematics built in any consistent unit system works, as long
/// as the SlabGeometry thickness uses the inverse unit.
struct ModeKinematics {
  double omega;
  double k;
  cdouble kz;
  cdouble kzm;
  Sector sector;
};

/// Square root on the branch Im >= 0, with Re >= 0 on the real axis.
cdouble causal_sqrt(cdouble z);

ModeKinematics mode_kinematics(double omega, double k, cdouble eps);

/// Kinematics in units where omega/c = 1: kz is given directly (real in [0, 1] or
/// purely imaginary with positive imaginary part).
ModeKinematics mode_kinematics_normalized(cdouble kz, cdouble eps);

cdouble fresnel_r(Polarization p, const ModeKinematics& kin, cdouble eps);
cdouble fresnel_t(Polarization p, const ModeKinematics& kin, cdouble eps);
cdouble fresnel_tbar(Polarization p, const ModeKinematics& kin, cdouble eps);

/// Reflection of a slab of finite thickness bounded by vacuum on both sides.
/// Throws ResonanceError if |1 - r^2 exp(2 i kzm d)| < 1e-14.
cdouble slab_rho(Polarization p, const ModeKinematics& kin, cdouble eps, const SlabGeometry& geom);
cdouble slab_tau(Polarization p, const ModeKinematics& kin, cdouble eps, const SlabGeometry& geom);

/// The shared denominator 1 - r^2 exp(2 i kzm d); its zeros are the slab's guided modes.
cdouble slab_denominator(Polarization p, const ModeKinematics& kin, cdouble eps,
                         const SlabGeometry& geom);

struct SlabResponse {
  cdouble rho;
  cdouble tau;
};

/// rho and tau together, sharing the exponentials.
SlabResponse slab_response(Polarization p, const ModeKinematics& kin, cdouble eps,
                           const SlabGeometry& geom);

}  // namespace noneq
