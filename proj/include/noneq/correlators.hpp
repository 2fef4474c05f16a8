#pragma once

#include <array>
#include <string>

#include "noneq/material.hpp"
#include "noneq/scattering.hpp"
#include "noneq/types.hpp"

namespace noneq {

/// Emitter heights above the slab face z = 0 and their transverse separation, in metres.
/// Emitter 1 sits at (r12, 0, z1) and emitter 2 at (0, 0, z2).
struct EmitterGeometry {
  double z1;
  double z2;
  double r12;

  void validate() const;
};

struct QuadratureSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-11;
  double evanescent_cutoff = 40.0;  // exponent of the e^{-Im kz (zq + zq')} kernel at k_max
  int max_subdivisions = 2000;

  void validate() const;
};

struct SlabInputs {
  PermittivityModel material;
  SlabGeometry slab;
};

/// Ordered emitter pair (q, q'), with q, q' in {1, 2}.
struct EmitterPair {
  int q;
  int qp;
};

struct AlphaPair {
  Matrix3c alpha_W;
  Matrix3c alpha_M;
  EmitterPair pair;
  double omega;
};

/// Integral matrices of one pair. A and B are complex; C, D, C2, D2 are real-valued but
/// stored complex so they combine directly with A and B.
struct PairIntegrals {
  Matrix3c A, B, C, D, C2, D2;
};

/// Largest normalized error of a quadrature run, for diagnostics.
struct QuadratureReport {
  int propagative_panels = 0;
  int evanescent_panels = 0;
  int evaluations = 0;
  double worst_error = 0;  // absolute error estimate of the worst component
  double worst_ratio = 0;  // that error divided by its tolerance (<= 1 when converged)
  std::string worst_entry;
  double k_max_over_k0 = 0;
};

/// Angular integrals N_p^{phi phi'} at transverse wavenumber k (1/m), signed separation r (m).
/// kz follows from k and omega (real below the light line, i|kz| above).
Matrix3c angular_integrals(Polarization p, double k, double omega, double r, int phi, int phip);

/// Same in units k0 = omega/c = 1: u = k/k0, kz = kz/k0, x = k0 r.
Matrix3c angular_integrals_normalized(Polarization p, double u, cdouble kz, double x, int phi,
                                      int phip);

/// All six integral matrices for the four ordered pairs (1,1), (2,2), (1,2), (2,1), evaluated on
/// shared quadrature nodes. Throws QuadratureError when any component fails to converge.
struct CorrelatorSet {
  double omega;
  std::array<PairIntegrals, 4> integrals;  // indexed as pair_index
  QuadratureReport report;

  AlphaPair alpha(EmitterPair pair) const;
  const PairIntegrals& at(EmitterPair pair) const;
};

int pair_index(EmitterPair pair);

CorrelatorSet compute_correlators(double omega, const EmitterGeometry& geometry,
                                  const SlabInputs& slab, const QuadratureSettings& settings);

/// A, B, C, D of a single pair (C2 and D2 are also filled in).
PairIntegrals integral_ABCD(EmitterPair pair, double omega, const EmitterGeometry& geometry,
                            const SlabInputs& slab, const QuadratureSettings& settings);

/// C2 and D2 of a single pair, returned as (C2, D2).
std::pair<Matrix3c, Matrix3c> integral_C2D2(EmitterPair pair, double omega,
                                            const EmitterGeometry& geometry,
                                            const SlabInputs& slab,
                                            const QuadratureSettings& settings);

/// alpha_W = (conj(A) + B + 2C)/2 and alpha_M = (A - B + 2D)/2, entrywise.
AlphaPair alpha_from_integrals(const PairIntegrals& in, EmitterPair pair, double omega);

AlphaPair alpha_pair(EmitterPair pair, double omega, const EmitterGeometry& geometry,
                     const SlabInputs& slab, const QuadratureSettings& settings);

/// Closed-form vacuum alpha_W for two emitters separated by `separation` (metres).
Eigen::Matrix3d free_space_alpha(double omega, const Vector3d& separation);

/// Parallel and perpendicular free-space components at reduced distance r = k0 |R|.
double free_space_alpha_parallel(double r);
double free_space_alpha_perpendicular(double r);

}  // namespace noneq
