#include "noneq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "noneq/error.hpp"

namespace noneq {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// The eight X-pattern entries, as (row, col).
constexpr int kXRow[8] = {0, 1, 2, 3, 1, 2, 0, 3};
constexpr int kXCol[8] = {0, 1, 2, 3, 2, 1, 3, 0};

template <int N>
using Vec = Eigen::Matrix<cdouble, N, 1>;
template <int N>
using Mat = Eigen::Matrix<cdouble, N, N>;

template <int N>
cdouble trace_of(const Vec<N>& y) {
  cdouble t = 0;
  if constexpr (N == 16) {
    for (int i = 0; i < 4; ++i) t += y(i + 4 * i);
  } else {
    for (int i = 0; i < 4; ++i) t += y(i);
  }
  return t;
}

template <int N>
std::vector<Vec<N>> integrate(const Mat<N>& A, const Vec<N>& y0, const std::vector<double>& grid,
                              double max_step, const EvolveOptions& opt) {
  std::vector<Vec<N>> out;
  out.reserve(grid.size());
  Vec<N> y = y0;
  double t = 0.0;
  double h = std::min(max_step, 1e-2);
  const cdouble tr0 = trace_of<N>(y0);
  for (double target : grid) {
    while (t < target) {
      // A step shortened to land on the grid point does not shrink the next proposal.
      const double h_free = h;
      const bool clipped = h > target - t;
      if (clipped) h = target - t;
      const Vec<N> k1 = A * y;
      const Vec<N> k2 = A * (y + h * a21 * k1);
      const Vec<N> k3 = A * (y + h * (a31 * k1 + a32 * k2));
      const Vec<N> k4 = A * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vec<N> k5 = A * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec<N> k6 = A * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec<N> y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec<N> k7 = A * y5;
      const Vec<N> err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double norm = 0.0;
      for (int i = 0; i < N; ++i) {
        const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
        norm = std::max(norm, std::abs(err(i)) / sc);
      }
      const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        t = clipped ? target : t + h;
        y = y5;
        h = std::min(clipped ? std::max(h * factor, h_free) : h * factor, max_step);
      } else {
        h *= factor;
        if (h < 1e-14 * std::max(1.0, t)) {
          throw IntegrationError("evolve: step size underflow at t = " + std::to_string(t));
        }
      }
    }
    if (std::abs(trace_of<N>(y) - tr0) > opt.trace_tol) {
      throw IntegrationError("evolve: trace drift exceeds tolerance at t = " +
                             std::to_string(target));
    }
    out.push_back(y);
  }
  return out;
}

DensityMatrix hermitize(const DensityMatrix& r) { return 0.5 * (r + r.adjoint()); }

}  // namespace

Matrix4c lowering(int q) {
  Matrix4c s = Matrix4c::Zero();
  if (q == 1) {
    s(0, 1) = 1.0;  // |eg> -> |gg>
    s(2, 3) = 1.0;  // |ee> -> |ge>
  } else if (q == 2) {
    s(0, 2) = 1.0;  // |ge> -> |gg>
    s(1, 3) = 1.0;  // |ee> -> |eg>
  } else {
    throw DomainError("qubit index must be 1 or 2");
  }
  return s;
}

Matrix16c superop(const Matrix4c& A, const Matrix4c& B) {
  Matrix16c out;
  const Matrix4c Bt = B.transpose();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = Bt(i, j) * A;
  return out;
}

Vector16c vectorize(const DensityMatrix& rho) {
  return Eigen::Map<const Vector16c>(rho.data());
}

DensityMatrix unvectorize(const Vector16c& v) { return Eigen::Map<const Matrix4c>(v.data()); }

Liouvillian build_liouvillian(const RateSet& rates, double omega0_over_gamma0,
                              bool include_bare_hamiltonian) {
  const cdouble I{0.0, 1.0};
  const Matrix4c id = Matrix4c::Identity();
  const Matrix4c s[2] = {lowering(1), lowering(2)};

  Matrix4c H = rates.lambda * s[0].adjoint() * s[1] + std::conj(rates.lambda) * s[1].adjoint() * s[0];
  if (include_bare_hamiltonian) {
    H += omega0_over_gamma0 * (s[0].adjoint() * s[0] + s[1].adjoint() * s[1]);
  }
  Matrix16c L = -I * (superop(H, id) - superop(id, H));

  for (int q = 0; q < 2; ++q) {
    for (int qp = 0; qp < 2; ++qp) {
      const cdouble gd = rates.gamma_down(q, qp);
      const cdouble gu = rates.gamma_up(q, qp);
      const Matrix4c sq_dag = s[q].adjoint();
      const Matrix4c sqp_dag = s[qp].adjoint();
      const Matrix4c down = sq_dag * s[qp];
      const Matrix4c up = s[q] * sqp_dag;
      L += gd * (superop(s[qp], sq_dag) - 0.5 * (superop(down, id) + superop(id, down)));
      L += gu * (superop(sqp_dag, s[q]) - 0.5 * (superop(up, id) + superop(id, up)));
    }
  }

  double fastest = std::abs(rates.lambda);
  if (include_bare_hamiltonian) fastest = std::max(fastest, 2.0 * std::abs(omega0_over_gamma0));
  fastest = std::max(fastest, rates.gamma_down.cwiseAbs().maxCoeff());
  fastest = std::max(fastest, rates.gamma_up.cwiseAbs().maxCoeff());
  return {L, rates, 0.1 / std::max(1.0, fastest)};
}

std::vector<DensityMatrix> evolve(const Liouvillian& L, const DensityMatrix& rho0,
                                  const std::vector<double>& t_grid, const EvolveOptions& options) {
  validate_density_matrix(rho0, 1e-10);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw DomainError("evolve: time grid must be nonnegative and strictly ascending");
    }
  }
  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  if (options.x_fast_path) {
    if (x_violation(rho0) > 1e-12) throw DomainError("evolve: X fast path needs an X state");
    Mat<8> A;
    Vec<8> y0;
    for (int a = 0; a < 8; ++a) {
      y0(a) = rho0(kXRow[a], kXCol[a]);
      for (int b = 0; b < 8; ++b) A(a, b) = L.L(kXRow[a] + 4 * kXCol[a], kXRow[b] + 4 * kXCol[b]);
    }
    for (const auto& y : integrate<8>(A, y0, t_grid, L.max_step, options)) {
      DensityMatrix r = DensityMatrix::Zero();
      for (int a = 0; a < 8; ++a) r(kXRow[a], kXCol[a]) = y(a);
      out.push_back(hermitize(r));
    }
    return out;
  }
  for (const auto& y : integrate<16>(L.L, vectorize(rho0), t_grid, L.max_step, options)) {
    out.push_back(hermitize(unvectorize(y)));
  }
  return out;
}

bool is_singular_case(const RateSet& r, double tol) {
  for (const Matrix2c* m : {&r.gamma_down, &r.gamma_up}) {
    const double ref = std::abs((*m)(0, 0));
    for (int i = 0; i < 4; ++i) {
      const cdouble v = (*m)(i % 2, i / 2);
      if (std::abs(v - (*m)(0, 0)) > tol * std::max(ref, std::numeric_limits<double>::min())) {
        return false;
      }
    }
  }
  return std::abs(r.gamma_down(0, 0)) > 0;
}

DensityMatrix singular_steady(const RateSet& rates, double rho_A0) {
  const double gd = rates.gamma_down(0, 0).real();
  const double gu = rates.gamma_up(0, 0).real();
  const double Z = gu * gu + gd * gu + gd * gd;
  CoupledBasisState s;
  s.G = gd * gd * (1.0 - rho_A0) / Z;
  s.A = rho_A0;
  s.S = gu * gd * (1.0 - rho_A0) / Z;
  s.E = gu * gu * (1.0 - rho_A0) / Z;
  return from_coupled(s);
}

namespace {

// X-block indices of the coupled-basis generator: the four populations, then rho_AS, rho_SA.
constexpr int kPop[4] = {0 + 4 * 0, 1 + 4 * 1, 2 + 4 * 2, 3 + 4 * 3};
constexpr int kCoh[2] = {1 + 4 * 2, 2 + 4 * 1};

// Stationary vector of a 4-state rate matrix (dp/dt = M p, columns summing to zero) by
// Grassmann-Taksar-Heyman elimination. Diagonal entries are never used, so no cancellation
// occurs when some rates are many orders of magnitude smaller than others. Returns false if
// an elimination pivot is not positive.
bool gth_stationary(const Eigen::Matrix4d& M, Eigen::Vector4d& p) {
  Eigen::Matrix4d Q = M.transpose();  // row convention: Q(i, j) is the rate i -> j
  for (int k = 3; k > 0; --k) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += Q(k, j);
    if (!(s > 0)) return false;
    for (int i = 0; i < k; ++i) Q(i, k) /= s;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j) Q(i, j) += Q(i, k) * Q(k, j);
  }
  p(0) = 1.0;
  for (int k = 1; k < 4; ++k) {
    p(k) = 0.0;
    for (int i = 0; i < k; ++i) p(k) += p(i) * Q(i, k);
  }
  p /= p.sum();
  return p.allFinite() && p.minCoeff() >= 0.0;
}

}  // namespace

Matrix16c coupled_liouvillian(const RateSet& rates, double omega0_over_gamma0,
                              bool include_bare_hamiltonian) {
  const cdouble I{0.0, 1.0};
  const Matrix4c id = Matrix4c::Identity();
  const Matrix4c U = coupled_basis();
  const Matrix4c s[2] = {U.adjoint() * lowering(1) * U, U.adjoint() * lowering(2) * U};

  // Written out directly so the large Lambda never mixes into population entries.
  const double re = rates.lambda.real(), im = rates.lambda.imag();
  Matrix4c H = Matrix4c::Zero();
  H(1, 1) = -re;
  H(2, 2) = re;
  H(1, 2) = I * im;
  H(2, 1) = -I * im;
  if (include_bare_hamiltonian) {
    H(1, 1) += omega0_over_gamma0;
    H(2, 2) += omega0_over_gamma0;
    H(3, 3) = 2.0 * omega0_over_gamma0;
  }
  Matrix16c L = -I * (superop(H, id) - superop(id, H));
  for (int q = 0; q < 2; ++q) {
    for (int qp = 0; qp < 2; ++qp) {
      const Matrix4c sq_dag = s[q].adjoint();
      const Matrix4c sqp_dag = s[qp].adjoint();
      const Matrix4c down = sq_dag * s[qp];
      const Matrix4c up = s[q] * sqp_dag;
      L += rates.gamma_down(q, qp) *
           (superop(s[qp], sq_dag) - 0.5 * (superop(down, id) + superop(id, down)));
      L += rates.gamma_up(q, qp) *
           (superop(sqp_dag, s[q]) - 0.5 * (superop(up, id) + superop(id, up)));
    }
  }
  return L;
}

SteadyStateReport steady_state(const Liouvillian& L, const DensityMatrix* rho0) {
  SteadyStateReport rep;
  rep.singular_case = is_singular_case(L.rates);
  if (rep.singular_case) {
    rep.null_dimension = 2;
    rep.rank_ambiguous = true;
    const double a0 = rho0 ? to_coupled(*rho0).A : 0.0;
    rep.rho = singular_steady(L.rates, a0);
    return rep;
  }

  // The steady state lives in the X block. In the coupled basis the dipole-dipole shift only
  // rotates rho_AS, so eliminating the two coherences leaves a 4x4 rate matrix for the
  // populations whose entries are all of the order of the decay rates.
  const bool bare = false;  // the bare Hamiltonian does not act on the X block
  const Matrix16c Lc = coupled_liouvillian(L.rates, 0.0, bare);
  Eigen::Matrix4cd Lpp;
  Eigen::Matrix<cdouble, 4, 2> Lpc;
  Eigen::Matrix<cdouble, 2, 4> Lcp;
  Eigen::Matrix2cd Lcc;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) Lpp(i, j) = Lc(kPop[i], kPop[j]);
    for (int j = 0; j < 2; ++j) {
      Lpc(i, j) = Lc(kPop[i], kCoh[j]);
      Lcp(j, i) = Lc(kCoh[j], kPop[i]);
    }
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) Lcc(i, j) = Lc(kCoh[i], kCoh[j]);

  const Eigen::FullPivLU<Eigen::Matrix2cd> lu(Lcc);
  const bool coherences_decay = lu.isInvertible();
  Eigen::Matrix<cdouble, 2, 4> X = Eigen::Matrix<cdouble, 2, 4>::Zero();
  if (coherences_decay) X = lu.solve(Lcp);
  const Eigen::Matrix4d M = (Lpp - Lpc * X).real();

  Eigen::JacobiSVD<Eigen::Matrix4d> msvd(M, Eigen::ComputeFullV);
  const auto& sv = msvd.singularValues();
  rep.smallest_singular_value = sv(3);
  rep.second_singular_value = sv(2);
  rep.rank_ambiguous = sv(2) < 1e3 * sv(3);
  const double thresh = 64 * std::numeric_limits<double>::epsilon() * std::max(sv(0), 1e-300);
  rep.null_dimension = 0;
  for (int i = 0; i < 4; ++i) rep.null_dimension += sv(i) <= thresh ? 1 : 0;

  // Coherence blocks outside the X block contribute further null directions only when the
  // rates vanish; check them on the full generator restricted to those indices.
  {
    std::vector<int> rest;
    for (int k = 0; k < 16; ++k) {
      if (std::find(std::begin(kPop), std::end(kPop), k) == std::end(kPop) &&
          std::find(std::begin(kCoh), std::end(kCoh), k) == std::end(kCoh)) {
        rest.push_back(k);
      }
    }
    Eigen::MatrixXcd R(rest.size(), rest.size());
    for (std::size_t i = 0; i < rest.size(); ++i)
      for (std::size_t j = 0; j < rest.size(); ++j) R(i, j) = Lc(rest[i], rest[j]);
    Eigen::JacobiSVD<Eigen::MatrixXcd> rsvd(R);
    const auto& rs = rsvd.singularValues();
    const double rt = 64 * std::numeric_limits<double>::epsilon() * std::max(rs(0), 1e-300);
    for (Eigen::Index i = 0; i < rs.size(); ++i) rep.null_dimension += rs(i) <= rt ? 1 : 0;
    if (!coherences_decay) rep.null_dimension += 2 - lu.rank();
  }
  rep.null_dimension = std::max(rep.null_dimension, 1);

  Eigen::Vector4d p;
  if (!gth_stationary(M, p)) {
    p = msvd.matrixV().col(3);
    if (std::abs(p.sum()) < 1e-300) throw NumericalError("steady_state: null vector has zero trace");
    p /= p.sum();
  }
  Matrix4c rc = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) rc(i, i) = p(i);
  const Eigen::Vector2cd c = -X * p.cast<cdouble>();
  rc(1, 2) = c(0);
  rc(2, 1) = c(1);
  rep.rho = hermitize(from_coupled_matrix(rc));
  return rep;
}

Matrix4c coupled_basis() {
  const double h = 1.0 / std::sqrt(2.0);
  Matrix4c U = Matrix4c::Zero();
  U(0, 0) = 1.0;
  U(1, 1) = h;
  U(2, 1) = -h;
  U(1, 2) = h;
  U(2, 2) = h;
  U(3, 3) = 1.0;
  return U;
}

Matrix4c to_coupled_matrix(const DensityMatrix& rho) {
  const Matrix4c U = coupled_basis();
  return U.adjoint() * rho * U;
}

DensityMatrix from_coupled_matrix(const Matrix4c& rc) {
  const Matrix4c U = coupled_basis();
  return U * rc * U.adjoint();
}

CoupledBasisState to_coupled(const DensityMatrix& rho) {
  const Matrix4c c = to_coupled_matrix(rho);
  CoupledBasisState s;
  s.G = c(0, 0).real();
  s.A = c(1, 1).real();
  s.S = c(2, 2).real();
  s.E = c(3, 3).real();
  s.AS = c(1, 2);
  s.GE = c(0, 3);
  return s;
}

DensityMatrix from_coupled(const CoupledBasisState& s) {
  Matrix4c c = Matrix4c::Zero();
  c(0, 0) = s.G;
  c(1, 1) = s.A;
  c(2, 2) = s.S;
  c(3, 3) = s.E;
  c(1, 2) = s.AS;
  c(2, 1) = std::conj(s.AS);
  c(0, 3) = s.GE;
  c(3, 0) = std::conj(s.GE);
  return from_coupled_matrix(c);
}

SymmetricSteady symmetric_steady(const ChannelParams& ch) {
  const double gA = ch.gamma_A, gS = ch.gamma_S, nA = ch.n_A, nS = ch.n_S;
  const double G = (1 + nA) * (1 + nA) * (1 + 2 * nS) * gA + (1 + 2 * nA) * (1 + nS) * (1 + nS) * gS;
  const double A = nA * (1 + nA) * (1 + 2 * nS) * gA + (nA * (1 + 2 * nS) + nS * nS * (1 + 2 * nA)) * gS;
  const double S = nS * (1 + nS) * (1 + 2 * nA) * gS + (nS * (1 + 2 * nA) + nA * nA * (1 + 2 * nS)) * gA;
  const double E = nA * nA * (1 + 2 * nS) * gA + (1 + 2 * nA) * nS * nS * gS;
  SymmetricSteady out;
  out.Z = G + A + S + E;
  out.state.G = G / out.Z;
  out.state.A = A / out.Z;
  out.state.S = S / out.Z;
  out.state.E = E / out.Z;
  out.rho23 = (nS - nA) * (gS + gA) / (2.0 * out.Z);
  return out;
}

std::pair<cdouble, cdouble> coherence_decay(const ChannelParams& ch, double lambda,
                                            cdouble rho_AS0, cdouble rho_GE0, double t,
                                            double omega0_over_gamma0) {
  const double kappa = 0.5 * (ch.gamma_A * (1 + 2 * ch.n_A) + ch.gamma_S * (1 + 2 * ch.n_S));
  const cdouble I{0.0, 1.0};
  return {rho_AS0 * std::exp((-kappa + 2.0 * I * lambda) * t),
          rho_GE0 * std::exp((-kappa + 2.0 * I * omega0_over_gamma0) * t)};
}

DensityMatrix named_state(const std::string& name) {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  const double h = 1.0 / std::sqrt(2.0);
  if (name == "G") {
    psi(0) = 1.0;
  } else if (name == "E") {
    psi(3) = 1.0;
  } else if (name == "A") {
    psi(1) = h;
    psi(2) = -h;
  } else if (name == "S") {
    psi(1) = h;
    psi(2) = h;
  } else if (name == "2") {
    psi(1) = 1.0;
  } else if (name == "3") {
    psi(2) = 1.0;
  } else {
    throw DomainError("unknown initial state '" + name + "' (expected G, E, A, S, 2 or 3)");
  }
  return psi * psi.adjoint();
}

void validate_density_matrix(const DensityMatrix& rho, double tol) {
  if (!rho.allFinite()) throw DomainError("density matrix has non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw DomainError("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - 1.0) > tol) throw DomainError("density matrix trace is not 1");
}

double x_violation(const DensityMatrix& rho) {
  double v = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j && i + j != 3) v = std::max(v, std::abs(rho(i, j)));
  return v;
}

}  // namespace noneq
