#pragma once

#include <array>
#include <optional>

#include "noneq/correlators.hpp"
#include "noneq/types.hpp"

namespace noneq {

/// Common transition frequency, unit dipoles and the ratio Gamma0^2 / Gamma0^1.
struct EmitterPairConfig {
  double omega0;
  Vector3c dipole1;
  Vector3c dipole2;
  double gamma0_ratio = 1.0;

  void validate() const;
};

/// Master-equation coefficients in units of Gamma0 = Gamma0^1(omega).
struct RateSet {
  Matrix2c gamma_down = Matrix2c::Zero();  // Gamma^{qq'}(omega)
  Matrix2c gamma_up = Matrix2c::Zero();    // Gamma^{qq'}(-omega)
  cdouble lambda{0.0, 0.0};                // Lambda^{12}; Lambda^{21} = conj(lambda)
};

/// Dipole-contracted alpha_W^{qq'} and alpha_M^{qq'} as 2x2 matrices indexed by (q, q').
struct AlphaScalars {
  Matrix2c W = Matrix2c::Zero();
  Matrix2c M = Matrix2c::Zero();
};

/// Decay channels of the symmetric configuration.
struct ChannelParams {
  double gamma_S;
  double gamma_A;
  double n_S;
  double n_A;
  double T_S;  // K, NaN when omega was not supplied
  double T_A;
};

/// Bose occupation 1/(exp(hbar omega / kB T) - 1); exactly 0 at T = 0.
double photon_number(double omega, double T);

/// Inverse of photon_number in T. n = 0 gives 0.
double temperature_from_photon_number(double omega, double n);

/// sum_ii' conj(d1_i) m_ii' d2_i'.
cdouble contract(const Vector3c& d1, const Matrix3c& m, const Vector3c& d2);

AlphaScalars contract_alphas(const std::array<AlphaPair, 4>& alphas, const EmitterPairConfig& em);
AlphaScalars contract_alphas(const CorrelatorSet& set, const EmitterPairConfig& em);

/// Gamma^{qq'}(+-omega) from contracted alphas and the two photon numbers. lambda is left at 0.
RateSet gamma_rates(const AlphaScalars& a, double gamma0_ratio, double n_W, double n_M);

/// AlphaPairs ordered (1,1), (2,2), (1,2), (2,1); all must share the same omega.
RateSet gamma_rates(const std::array<AlphaPair, 4>& alphas, const EmitterPairConfig& em,
                    double T_W, double T_M);

/// Free-space dipole-dipole shift Lambda0^{12} (units of Gamma0) between dipole d1 at R1 and d2 at
/// R2. Throws DomainError for coincident positions.
cdouble lambda_free(double omega, const Vector3d& R1, const Vector3d& R2, const Vector3c& d1,
                    const Vector3c& d2, double gamma0_ratio = 1.0);

/// Lambda^{12} including the slab's reflected part, from precomputed correlators.
cdouble lambda_slab(const CorrelatorSet& set, const EmitterGeometry& geometry,
                    const EmitterPairConfig& em);

cdouble lambda_slab(double omega, const EmitterGeometry& geometry, const SlabInputs& slab,
                    const EmitterPairConfig& em, const QuadratureSettings& settings);

/// Channel rates and photon numbers. Requires alpha^11 = alpha^22 and real alpha^12 (relative
/// 1e-9); throws DomainError otherwise or when a channel rate is not positive.
/// Pass omega <= 0 to skip the effective temperatures.
ChannelParams channel_params(const AlphaScalars& a, double n_W, double n_M, double omega = 0.0);

/// Rates of the symmetric configuration rebuilt from its channels (gamma0_ratio = 1).
RateSet rates_from_channels(const ChannelParams& ch, cdouble lambda = 0.0);

struct SystemConfig {
  SlabInputs slab;
  EmitterGeometry geometry;
  EmitterPairConfig emitters;
  double T_W = 0.0;
  double T_M = 0.0;
  QuadratureSettings quadrature;

  void validate() const;
};

struct RatesReport {
  RateSet rates;
  AlphaScalars alphas;
  double n_W = 0;
  double n_M = 0;
  std::optional<ChannelParams> channels;  // set when the configuration is symmetric
  QuadratureReport quadrature;
};

/// Rates assembled from correlators that were computed for cfg's geometry and frequency.
RatesReport rates_from_correlators(const SystemConfig& cfg, const CorrelatorSet& set);

RatesReport compute_rates(const SystemConfig& cfg);

/// True when alpha^11 = alpha^22 and Im alpha^12 = 0 within relative tol, for both W and M.
bool is_symmetric(const AlphaScalars& a, double tol = 1e-9);

}  // namespace noneq
