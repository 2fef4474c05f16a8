#pragma once

#include <string>
#include <vector>

#include "noneq/rates.hpp"
#include "noneq/types.hpp"

namespace noneq {

using Matrix16c = Eigen::Matrix<cdouble, 16, 16>;
using Vector16c = Eigen::Matrix<cdouble, 16, 1>;

/// Generator of the two-qubit master equation acting on column-stacked density matrices:
/// vec(rho)[i + 4 j] = rho(i, j). Time is in units of 1/Gamma0.
struct Liouvillian {
  Matrix16c L;
  RateSet rates;
  double max_step;  // step ceiling for the integrator, 0.1 / max(1, fastest frequency)
};

/// Lowering operator of qubit q (1 or 2) in the decoupled basis {gg, eg, ge, ee}.
Matrix4c lowering(int q);

/// vec(A X B) = (B^T kron A) vec(X).
Matrix16c superop(const Matrix4c& A, const Matrix4c& B);

Vector16c vectorize(const DensityMatrix& rho);
DensityMatrix unvectorize(const Vector16c& v);

/// Builds
///   -i [H, rho] + sum_qq' Gamma^{qq'}(w) (s_q' rho s_q^+ - {s_q^+ s_q', rho}/2)
///               + sum_qq' Gamma^{qq'}(-w) (s_q'^+ rho s_q - {s_q s_q'^+, rho}/2)
/// with H = Lambda12 s1^+ s2 + Lambda21 s2^+ s1, plus omega (s1^+ s1 + s2^+ s2) when
/// include_bare_hamiltonian is set. omega0_over_gamma0 is only used in that case.
Liouvillian build_liouvillian(const RateSet& rates, double omega0_over_gamma0 = 0.0,
                              bool include_bare_hamiltonian = false);

/// The same generator expressed in the coupled basis {G, A, S, E} (same column stacking).
Matrix16c coupled_liouvillian(const RateSet& rates, double omega0_over_gamma0 = 0.0,
                              bool include_bare_hamiltonian = false);

struct EvolveOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double trace_tol = 1e-8;
  /// Integrate only the eight X-pattern entries. Requires an X-state initial condition.
  bool x_fast_path = false;
};

/// Density matrices at every time of the ascending grid t_grid (t >= 0, starting from rho0 at
/// t = 0). Dormand-Prince 5(4) with step ceiling L.max_step. Outputs are Hermitized, never
/// renormalized; throws IntegrationError on trace drift or step underflow.
std::vector<DensityMatrix> evolve(const Liouvillian& L, const DensityMatrix& rho0,
                                  const std::vector<double>& t_grid,
                                  const EvolveOptions& options = {});

struct SteadyStateReport {
  DensityMatrix rho;
  int null_dimension = 1;
  bool singular_case = false;   // all Gamma^{qq'}(+-w) equal: steady state depends on rho_A(0)
  bool rank_ambiguous = false;  // second-smallest singular value < 1e3 x smallest
  double smallest_singular_value = 0;
  double second_singular_value = 0;
};

/// Stationary state of L. The X block is reduced in the coupled basis to a 4x4 population rate
/// matrix (coherences eliminated), whose singular values give the degeneracy diagnostics and
/// whose null vector is found by GTH elimination. In the singular case the returned state is
/// the member of the steady family fixed by rho_A(0) of rho0 (0 when rho0 is null).
SteadyStateReport steady_state(const Liouvillian& L, const DensityMatrix* rho0 = nullptr);

/// True when the four Gamma^{qq'}(w) and the four Gamma^{qq'}(-w) coincide within rel tol.
bool is_singular_case(const RateSet& rates, double tol = 1e-10);

/// Steady family of the singular case, diagonal in the coupled basis.
DensityMatrix singular_steady(const RateSet& rates, double rho_A0);

/// Populations and coherences in the coupled basis |G>, |A> = (|eg> - |ge>)/sqrt2,
/// |S> = (|eg> + |ge>)/sqrt2, |E>.
struct CoupledBasisState {
  double G = 0, A = 0, S = 0, E = 0;
  cdouble AS{0.0, 0.0};  // <A|rho|S>
  cdouble GE{0.0, 0.0};  // <G|rho|E>
};

/// Unitary whose columns are |G>, |A>, |S>, |E> expressed in the decoupled basis.
Matrix4c coupled_basis();

/// rho expressed in the coupled basis, U^+ rho U.
Matrix4c to_coupled_matrix(const DensityMatrix& rho);
DensityMatrix from_coupled_matrix(const Matrix4c& rc);

CoupledBasisState to_coupled(const DensityMatrix& rho);
/// X state built from coupled populations and coherences (rho_SA = conj(rho_AS)).
DensityMatrix from_coupled(const CoupledBasisState& s);

struct SymmetricSteady {
  CoupledBasisState state;
  double Z;
  double rho23;  // decoupled-basis coherence <eg|rho|ge>
};

/// Stationary solution of the channel rate equations.
SymmetricSteady symmetric_steady(const ChannelParams& ch);

/// Closed-form rho_AS(t) and rho_GE(t) of the symmetric case. Both decay at
/// [Gamma_A (1 + 2 n_A) + Gamma_S (1 + 2 n_S)] / 2 and rotate at 2 Lambda and 2 omega.
std::pair<cdouble, cdouble> coherence_decay(const ChannelParams& ch, double lambda,
                                            cdouble rho_AS0, cdouble rho_GE0, double t,
                                            double omega0_over_gamma0 = 0.0);

/// Named initial states: G, E, A, S, 2 (= |eg>), 3 (= |ge>). Throws DomainError otherwise.
DensityMatrix named_state(const std::string& name);

/// Throws DomainError unless rho is Hermitian and has unit trace within tol.
void validate_density_matrix(const DensityMatrix& rho, double tol = 1e-12);

/// Largest entry off the X pattern (main diagonal and anti-diagonal).
double x_violation(const DensityMatrix& rho);

}  // namespace noneq
