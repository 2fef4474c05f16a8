#include "noneq/rates.hpp"

#include <cmath>
#include <limits>

#include "noneq/constants.hpp"
#include "noneq/error.hpp"

namespace noneq {

void EmitterPairConfig::validate() const {
  if (!(omega0 > 0) || !std::isfinite(omega0)) throw DomainError("omega0 must be positive");
  if (std::abs(dipole1.norm() - 1.0) > 1e-9) throw DomainError("dipole1 must be a unit vector");
  if (std::abs(dipole2.norm() - 1.0) > 1e-9) throw DomainError("dipole2 must be a unit vector");
  if (!(gamma0_ratio > 0) || !std::isfinite(gamma0_ratio)) {
    throw DomainError("gamma0_ratio must be positive");
  }
}

void SystemConfig::validate() const {
  geometry.validate();
  emitters.validate();
  quadrature.validate();
  if (!(T_W >= 0) || !(T_M >= 0)) throw DomainError("temperatures must be >= 0");
  if (const auto* dl = std::get_if<DrudeLorentzModel>(&slab.material)) dl->validate();
  if (!is_vacuum(slab.material) &&
      (!(slab.slab.thickness > 0) || !std::isfinite(slab.slab.thickness))) {
    throw DomainError("slab thickness must be positive and finite");
  }
}

double photon_number(double omega, double T) {
  if (!(omega > 0)) throw DomainError("photon_number: omega must be > 0");
  if (!(T >= 0)) throw DomainError("photon_number: T must be >= 0");
  if (T == 0.0) return 0.0;
  return 1.0 / std::expm1(constants::hbar * omega / (constants::k_B * T));
}

double temperature_from_photon_number(double omega, double n) {
  if (!(omega > 0)) throw DomainError("omega must be > 0");
  if (!(n >= 0)) throw DomainError("photon number must be >= 0");
  if (n == 0.0) return 0.0;
  return constants::hbar * omega / (constants::k_B * std::log1p(1.0 / n));
}

cdouble contract(const Vector3c& d1, const Matrix3c& m, const Vector3c& d2) {
  return d1.dot(m * d2);  // Eigen's dot conjugates the left operand
}

AlphaScalars contract_alphas(const std::array<AlphaPair, 4>& alphas, const EmitterPairConfig& em) {
  const Vector3c* d[2] = {&em.dipole1, &em.dipole2};
  AlphaScalars out;
  for (const AlphaPair& a : alphas) {
    const int q = a.pair.q - 1, qp = a.pair.qp - 1;
    out.W(q, qp) = contract(*d[q], a.alpha_W, *d[qp]);
    out.M(q, qp) = contract(*d[q], a.alpha_M, *d[qp]);
  }
  return out;
}

AlphaScalars contract_alphas(const CorrelatorSet& set, const EmitterPairConfig& em) {
  return contract_alphas({set.alpha({1, 1}), set.alpha({2, 2}), set.alpha({1, 2}),
                          set.alpha({2, 1})},
                         em);
}

RateSet gamma_rates(const AlphaScalars& a, double gamma0_ratio, double n_W, double n_M) {
  const double s[2] = {1.0, std::sqrt(gamma0_ratio)};
  RateSet r;
  for (int q = 0; q < 2; ++q) {
    for (int qp = 0; qp < 2; ++qp) {
      const double scale = s[q] * s[qp];
      r.gamma_down(q, qp) = scale * ((1.0 + n_W) * a.W(q, qp) + (1.0 + n_M) * a.M(q, qp));
      r.gamma_up(q, qp) = scale * (n_W * std::conj(a.W(q, qp)) + n_M * std::conj(a.M(q, qp)));
    }
  }
  return r;
}

RateSet gamma_rates(const std::array<AlphaPair, 4>& alphas, const EmitterPairConfig& em,
                    double T_W, double T_M) {
  const double omega = alphas[0].omega;
  for (const auto& a : alphas) {
    if (a.omega != omega) throw DomainError("gamma_rates: AlphaPairs at different frequencies");
  }
  return gamma_rates(contract_alphas(alphas, em), em.gamma0_ratio, photon_number(omega, T_W),
                     photon_number(omega, T_M));
}

cdouble lambda_free(double omega, const Vector3d& R1, const Vector3d& R2, const Vector3c& d1,
                    const Vector3c& d2, double gamma0_ratio) {
  if (!(omega > 0)) throw DomainError("omega must be > 0");
  const Vector3d sep = R1 - R2;
  const double dist = sep.norm();
  if (!(dist > 0)) throw DomainError("lambda_free: emitters at the same position");
  const double r = omega / constants::c * dist;
  const Vector3c n = (sep / dist).cast<cdouble>();
  const cdouble dd = d1.dot(d2);
  const cdouble d1n = d1.dot(n);             // conj(d1) . n
  const cdouble d2n = n.transpose() * d2;    // d2 . n
  const double r3 = r * r * r;
  const double transverse = ((r * r - 1.0) * std::cos(r) - r * std::sin(r)) / r3;
  const double longitudinal = 2.0 * (std::cos(r) + r * std::sin(r)) / r3;
  return -0.75 * std::sqrt(gamma0_ratio) *
         ((dd - d1n * d2n) * transverse + d1n * d2n * longitudinal);
}

cdouble lambda_slab(const CorrelatorSet& set, const EmitterGeometry& geometry,
                    const EmitterPairConfig& em) {
  const Vector3d R1(geometry.r12, 0.0, geometry.z1);
  const Vector3d R2(0.0, 0.0, geometry.z2);
  const PairIntegrals& in = set.at({1, 2});
  const cdouble reflected = contract(em.dipole1, in.C2 - in.D2, em.dipole2);
  return lambda_free(set.omega, R1, R2, em.dipole1, em.dipole2, em.gamma0_ratio) +
         std::sqrt(em.gamma0_ratio) * reflected;
}

cdouble lambda_slab(double omega, const EmitterGeometry& geometry, const SlabInputs& slab,
                    const EmitterPairConfig& em, const QuadratureSettings& settings) {
  return lambda_slab(compute_correlators(omega, geometry, slab, settings), geometry, em);
}

bool is_symmetric(const AlphaScalars& a, double tol) {
  const double scale = std::abs(a.W(0, 0)) + std::abs(a.M(0, 0)) + std::abs(a.W(1, 1)) +
                       std::abs(a.M(1, 1));
  const double bound = tol * std::max(scale, std::numeric_limits<double>::min());
  for (const Matrix2c* m : {&a.W, &a.M}) {
    if (std::abs((*m)(0, 0) - (*m)(1, 1)) > bound) return false;
    if (std::abs((*m)(0, 1).imag()) > bound || std::abs((*m)(1, 0).imag()) > bound) return false;
    if (std::abs((*m)(0, 1) - (*m)(1, 0)) > bound) return false;
  }
  return true;
}

ChannelParams channel_params(const AlphaScalars& a, double n_W, double n_M, double omega) {
  if (!is_symmetric(a)) {
    throw DomainError("channel_params: configuration is not symmetric (alpha11 != alpha22 or "
                      "alpha12 not real)");
  }
  const double w = a.W(0, 0).real(), w12 = a.W(0, 1).real();
  const double m = a.M(0, 0).real(), m12 = a.M(0, 1).real();
  ChannelParams ch;
  ch.gamma_A = w - w12 + m - m12;
  ch.gamma_S = w + w12 + m + m12;
  if (!(ch.gamma_A > 0) || !(ch.gamma_S > 0)) {
    throw DomainError("channel_params: channel rate is not positive");
  }
  ch.n_A = ((w - w12) * n_W + (m - m12) * n_M) / ch.gamma_A;
  ch.n_S = ((w + w12) * n_W + (m + m12) * n_M) / ch.gamma_S;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ch.T_A = nan;
  ch.T_S = nan;
  if (omega > 0) {
    if (ch.n_A >= 0) ch.T_A = temperature_from_photon_number(omega, ch.n_A);
    if (ch.n_S >= 0) ch.T_S = temperature_from_photon_number(omega, ch.n_S);
  }
  return ch;
}

RateSet rates_from_channels(const ChannelParams& ch, cdouble lambda) {
  const double dS = ch.gamma_S * (1.0 + ch.n_S), dA = ch.gamma_A * (1.0 + ch.n_A);
  const double uS = ch.gamma_S * ch.n_S, uA = ch.gamma_A * ch.n_A;
  RateSet r;
  r.gamma_down << 0.5 * (dS + dA), 0.5 * (dS - dA), 0.5 * (dS - dA), 0.5 * (dS + dA);
  r.gamma_up << 0.5 * (uS + uA), 0.5 * (uS - uA), 0.5 * (uS - uA), 0.5 * (uS + uA);
  r.lambda = lambda;
  return r;
}

RatesReport rates_from_correlators(const SystemConfig& cfg, const CorrelatorSet& set) {
  RatesReport rep;
  rep.alphas = contract_alphas(set, cfg.emitters);
  rep.n_W = photon_number(cfg.emitters.omega0, cfg.T_W);
  rep.n_M = photon_number(cfg.emitters.omega0, cfg.T_M);
  rep.rates = gamma_rates(rep.alphas, cfg.emitters.gamma0_ratio, rep.n_W, rep.n_M);
  rep.rates.lambda = lambda_slab(set, cfg.geometry, cfg.emitters);
  if (cfg.emitters.gamma0_ratio == 1.0 && is_symmetric(rep.alphas)) {
    try {
      rep.channels = channel_params(rep.alphas, rep.n_W, rep.n_M, cfg.emitters.omega0);
    } catch (const DomainError&) {
    }
  }
  rep.quadrature = set.report;
  return rep;
}

RatesReport compute_rates(const SystemConfig& cfg) {
  cfg.validate();
  const CorrelatorSet set =
      compute_correlators(cfg.emitters.omega0, cfg.geometry, cfg.slab, cfg.quadrature);
  return rates_from_correlators(cfg, set);
}

}  // namespace noneq
