#include "noneq/material.hpp"

#include <cmath>
#include <vector>

#include "noneq/error.hpp"

namespace noneq {

void DrudeLorentzModel::validate() const {
  if (!(eps_inf > 0) || !(omega_l > 0) || !(omega_r > 0) || !(gamma > 0)) {
    throw DomainError("Drude-Lorentz parameters must be strictly positive");
  }
  if (!(omega_l > omega_r)) {
    throw DomainError("Drude-Lorentz model requires omega_l > omega_r");
  }
}

cdouble permittivity(const DrudeLorentzModel& m, double omega) {
  if (!(omega > 0)) throw DomainError("permittivity: omega must be > 0");
  const cdouble damping{0.0, m.gamma * omega};
  const double w2 = omega * omega;
  return m.eps_inf * (w2 - m.omega_l * m.omega_l + damping) /
         (w2 - m.omega_r * m.omega_r + damping);
}

cdouble permittivity(const PermittivityModel& model, double omega) {
  if (!(omega > 0)) throw DomainError("permittivity: omega must be > 0");
  struct Visitor {
    double omega;
    cdouble operator()(const Vacuum&) const { return {1.0, 0.0}; }
    cdouble operator()(const DrudeLorentzModel& m) const { return permittivity(m, omega); }
    cdouble operator()(const TabulatedConstant& t) const { return t.eps; }
  };
  return std::visit(Visitor{omega}, model);
}

bool is_vacuum(const PermittivityModel& model) {
  return std::holds_alternative<Vacuum>(model);
}

double surface_resonance(const DrudeLorentzModel& m) {
  m.validate();
  auto f = [&](double w) { return permittivity(m, w).real() + 1.0; };

  // Re eps dips far below -1 just above omega_r and climbs back through -1 before
  // omega_l; bracket the last upward crossing on a fine grid, then bisect.
  constexpr int kSamples = 8192;
  const double span = m.omega_l - m.omega_r;
  double lo = 0, hi = 0;
  bool found = false;
  double prev_w = m.omega_r + span / kSamples;
  double prev_f = f(prev_w);
  for (int i = 2; i < kSamples; ++i) {
    const double w = m.omega_r + span * i / kSamples;
    const double fw = f(w);
    if (prev_f < 0 && fw >= 0) {
      lo = prev_w;
      hi = w;
      found = true;
    }
    prev_w = w;
    prev_f = fw;
  }
  if (!found) {
    throw NumericalError("surface_resonance: Re eps does not cross -1 inside (omega_r, omega_l)");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace noneq
