#include "noneq/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include "noneq/error.hpp"

namespace noneq {

namespace {

// Populations may carry tiny negative noise from integration.
double safe_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

}  // namespace

ConcurrenceReport concurrence_x(const DensityMatrix& rho) {
  if (x_violation(rho) > 1e-9) {
    throw DomainError("concurrence_x: state is not an X state; use concurrence_general");
  }
  ConcurrenceReport r;
  r.K1 = std::abs(rho(1, 2)) - safe_sqrt(rho(0, 0).real() * rho(3, 3).real());
  r.K2 = std::abs(rho(0, 3)) - safe_sqrt(rho(1, 1).real() * rho(2, 2).real());
  const double best = std::max({0.0, r.K1, r.K2});
  r.C = 2.0 * best;
  r.dominant = best <= 0.0 ? Branch::None : (r.K1 >= r.K2 ? Branch::K1 : Branch::K2);
  return r;
}

double k1_coupled(const CoupledBasisState& s) {
  const double dp = s.S - s.A;
  const double dc = std::abs(std::conj(s.AS) - s.AS);  // rho_SA - rho_AS
  return 0.5 * std::sqrt(dp * dp + dc * dc) - safe_sqrt(s.G * s.E);
}

double steady_concurrence(const ChannelParams& ch) {
  const double gA = ch.gamma_A, gS = ch.gamma_S, nA = ch.n_A, nS = ch.n_S;
  const SymmetricSteady st = symmetric_steady(ch);
  const double G = (1 + nA) * (1 + nA) * (1 + 2 * nS) * gA + (1 + 2 * nA) * (1 + nS) * (1 + nS) * gS;
  const double E = nA * nA * (1 + 2 * nS) * gA + (1 + 2 * nA) * nS * nS * gS;
  const double c = 2.0 / st.Z * (std::abs(nS - nA) * (gS + gA) / 2.0 - safe_sqrt(G) * safe_sqrt(E));
  return std::max(0.0, c);
}

double concurrence_general(const DensityMatrix& rho) {
  Matrix4c yy = Matrix4c::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const DensityMatrix h = 0.5 * (rho + rho.adjoint());
  const Matrix4c tilde = yy * h.conjugate() * yy;

  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix4c sq = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  const Matrix4c R = sq * tilde * sq;
  Eigen::SelfAdjointEigenSolver<Matrix4c> er(0.5 * (R + R.adjoint()), Eigen::EigenvaluesOnly);
  Eigen::Vector4d l = er.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(l.data(), l.data() + 4, std::greater<double>());
  return std::clamp(l(0) - l(1) - l(2) - l(3), 0.0, 1.0);
}

}  // namespace noneq
