#pragma once

#include <variant>

#include "noneq/types.hpp"

namespace noneq {

/// Single-oscillator Drude-Lorentz dielectric response
///   eps(w) = eps_inf (w^2 - w_l^2 + i g w) / (w^2 - w_r^2 + i g w).
/// All frequencies in rad/s.
struct DrudeLorentzModel {
  double eps_inf;
  double omega_l;
  double omega_r;
  double gamma;

  /// Throws DomainError unless all fields are positive and omega_l > omega_r.
  void validate() const;
};

/// Silicon carbide phonon-polariton parameters.
inline constexpr DrudeLorentzModel silicon_carbide{6.7, 1.827e14, 1.495e14, 0.009e14};

struct Vacuum {};

/// A fixed permittivity, independent of frequency.
struct TabulatedConstant {
  cdouble eps;
};

using PermittivityModel = std::variant<Vacuum, DrudeLorentzModel, TabulatedConstant>;

cdouble permittivity(const DrudeLorentzModel& model, double omega);
cdouble permittivity(const PermittivityModel& model, double omega);

bool is_vacuum(const PermittivityModel& model);

/// Upper root of Re eps(w) = -1 inside the reststrahlen band (surface phonon-polariton
/// frequency). Throws NumericalError when Re eps never crosses -1 on (omega_r, omega_l).
double surface_resonance(const DrudeLorentzModel& model);

}  // namespace noneq
