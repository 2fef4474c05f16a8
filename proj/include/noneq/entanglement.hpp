#pragma once

#include "noneq/dynamics.hpp"
#include "noneq/rates.hpp"
#include "noneq/types.hpp"

namespace noneq {

enum class Branch { None, K1, K2 };

struct ConcurrenceReport {
  double C;
  double K1;
  double K2;
  Branch dominant;
};

/// C = 2 max(0, K1, K2) with K1 = |rho23| - sqrt(rho11 rho44), K2 = |rho14| - sqrt(rho22 rho33).
/// Throws DomainError when an entry off the X pattern exceeds 1e-9 (use concurrence_general).
ConcurrenceReport concurrence_x(const DensityMatrix& rho);

/// K1 from coupled-basis populations and coherences.
double k1_coupled(const CoupledBasisState& s);

/// Steady concurrence of the symmetric configuration, clamped at 0.
double steady_concurrence(const ChannelParams& ch);

/// Wootters concurrence of an arbitrary two-qubit state.
double concurrence_general(const DensityMatrix& rho);

}  // namespace noneq
