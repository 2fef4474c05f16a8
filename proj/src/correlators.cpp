#include "noneq/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "noneq/constants.hpp"
#include "noneq/error.hpp"
#include "noneq/quadrature.hpp"
#include "noneq/special.hpp"

namespace noneq {

namespace {

// The five structurally nonzero entries of every N matrix.
constexpr int kEntries = 5;
constexpr int kRow[kEntries] = {0, 1, 0, 2, 2};
constexpr int kCol[kEntries] = {0, 1, 2, 0, 2};

using Entries = std::array<cdouble, kEntries>;

struct Bessel {
  double j0, j1, j2, j1x;  // J1(X)/X in j1x
};

Bessel bessel_at(double X) {
  if (X == 0.0) return {1.0, 0.0, 0.0, 0.5};
  return {bessel_j0(X), bessel_j1(X), bessel_j2(X), j1_over_x(X)};
}

Entries n_entries(Polarization p, double u, cdouble kz, const Bessel& J, int phi, int phip) {
  const cdouble I{0.0, 1.0};
  Entries n{};
  if (p == Polarization::TE) {
    n[0] = 2.0 * J.j1x;
    n[1] = 2.0 * J.j1x - 2.0 * J.j2;
    return n;
  }
  const double s = static_cast<double>(phi * phip);
  const double kz2 = std::norm(kz);
  n[0] = s * kz2 * (2.0 * J.j1x - 2.0 * J.j2);
  n[1] = s * kz2 * 2.0 * J.j1x;
  n[2] = -I * static_cast<double>(phi) * 2.0 * u * kz * J.j1;
  n[3] = -I * static_cast<double>(phip) * 2.0 * u * std::conj(kz) * J.j1;
  n[4] = 2.0 * u * u * J.j0;
  return n;
}

Matrix3c to_matrix(const Entries& e) {
  Matrix3c m = Matrix3c::Zero();
  for (int i = 0; i < kEntries; ++i) m(kRow[i], kCol[i]) = e[i];
  return m;
}

struct PairGeometry {
  double x;      // k0 (r_q - r_q') along x
  double delta;  // k0 (z_q - z_q')
  double sigma;  // k0 (z_q + z_q')
};

PairGeometry pair_geometry(EmitterPair pr, double k0, const EmitterGeometry& g) {
  const double z[2] = {g.z1, g.z2};
  const double xs[2] = {g.r12, 0.0};
  return {k0 * (xs[pr.q - 1] - xs[pr.qp - 1]), k0 * (z[pr.q - 1] - z[pr.qp - 1]),
          k0 * (z[pr.q - 1] + z[pr.qp - 1])};
}

constexpr int kPropPerPair = 30;  // A (10), B (10), C (5), C2 (5)
constexpr int kEvanPerPair = 10;  // D (5), D2 (5)

const char* kPropNames[] = {"Re A", "Im A", "Re B", "Im B", "C", "C2"};
const char* kEvanNames[] = {"D", "D2"};

std::string component_name(bool propagative, int idx, const std::vector<EmitterPair>& pairs) {
  const int per = propagative ? kPropPerPair : kEvanPerPair;
  const int pi = idx / per;
  const int local = idx % per;
  const int block = local / kEntries;
  const int entry = local % kEntries;
  std::ostringstream os;
  os << (propagative ? kPropNames[block] : kEvanNames[block]) << "(" << pairs[pi].q << ","
     << pairs[pi].qp << ")[" << kRow[entry] + 1 << "," << kCol[entry] + 1 << "]";
  return os.str();
}

struct Optics {
  bool vacuum;
  cdouble eps;
  SlabGeometry slab;  // thickness in units of 1/k0
};

void slab_coefficients(const Optics& o, cdouble kz, cdouble rho[2], cdouble tau[2]) {
  if (o.vacuum) {
    rho[0] = rho[1] = 0.0;
    tau[0] = tau[1] = 1.0;
    return;
  }
  const ModeKinematics kin = mode_kinematics_normalized(kz, o.eps);
  const Polarization ps[2] = {Polarization::TE, Polarization::TM};
  for (int p = 0; p < 2; ++p) {
    const SlabResponse r = slab_response(ps[p], kin, o.eps, o.slab);
    rho[p] = r.rho;
    tau[p] = r.tau;
  }
}

// Breakpoints near the guided-mode poles of the slab: local minima of |1 - r^2 e^{2ikzm d}|
// along the evanescent axis, located on a log grid and polished by golden section.
std::vector<double> pole_breakpoints(const Optics& o, double s_max) {
  std::vector<double> out;
  if (o.vacuum) return out;
  const Polarization ps[2] = {Polarization::TE, Polarization::TM};
  const int n = 600;
  const double lo = std::log(1e-9), hi = std::log(s_max);
  for (Polarization p : ps) {
    auto den = [&](double ls) {
      const ModeKinematics kin = mode_kinematics_normalized({0.0, std::exp(ls)}, o.eps);
      return std::abs(slab_denominator(p, kin, o.eps, o.slab));
    };
    std::vector<double> f(n + 1);
    for (int i = 0; i <= n; ++i) f[i] = den(lo + (hi - lo) * i / n);
    for (int i = 1; i < n; ++i) {
      if (!(f[i] < f[i - 1] && f[i] <= f[i + 1])) continue;
      double a = lo + (hi - lo) * (i - 1) / n, b = lo + (hi - lo) * (i + 1) / n;
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = b - g * (b - a), d = a + g * (b - a);
      double fc = den(c), fd = den(d);
      for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
        if (fc < fd) {
          b = d, d = c, fd = fc;
          c = b - g * (b - a);
          fc = den(c);
        } else {
          a = c, c = d, fc = fd;
          d = a + g * (b - a);
          fd = den(d);
        }
      }
      out.push_back(std::exp(0.5 * (a + b)));
    }
  }
  return out;
}

struct RawResult {
  std::vector<PairIntegrals> integrals;
  QuadratureReport report;
};

RawResult integrate_pairs(double omega, const EmitterGeometry& geometry, const SlabInputs& in,
                          const QuadratureSettings& settings,
                          const std::vector<EmitterPair>& pairs) {
  if (!(omega > 0)) throw DomainError("omega must be > 0");
  geometry.validate();
  settings.validate();
  const double k0 = omega / constants::c;

  Optics o;
  o.vacuum = is_vacuum(in.material);
  o.eps = permittivity(in.material, omega);
  if (!o.vacuum) {
    if (!(in.slab.thickness > 0) || !std::isfinite(in.slab.thickness)) {
      throw DomainError("slab thickness must be positive and finite");
    }
  }
  o.slab.thickness = k0 * in.slab.thickness;

  const std::size_t np = pairs.size();
  std::vector<PairGeometry> pg;
  for (auto pr : pairs) pg.push_back(pair_geometry(pr, k0, geometry));

  quad::Tolerance tol{settings.rel_tol, settings.abs_tol, settings.max_subdivisions};
  const Polarization ps[2] = {Polarization::TE, Polarization::TM};

  // Propagative sector, w = kz/k0 in [0, 1].
  auto prop = [&](double w) {
    Eigen::VectorXd out(kPropPerPair * np);
    const double u = std::sqrt(std::max(0.0, 1.0 - w * w));
    cdouble rho[2], tau[2];
    slab_coefficients(o, w, rho, tau);
    for (std::size_t k = 0; k < np; ++k) {
      const Bessel J = bessel_at(u * pg[k].x);
      const cdouble ed = std::polar(1.0, w * pg[k].delta);
      const cdouble es = std::polar(1.0, w * pg[k].sigma);
      Entries a{}, b{}, c{};
      for (int p = 0; p < 2; ++p) {
        const Entries npp = n_entries(ps[p], u, w, J, 1, 1);
        const Entries npm = n_entries(ps[p], u, w, J, 1, -1);
        const double weight = std::norm(rho[p]) + std::norm(tau[p]);
        for (int e = 0; e < kEntries; ++e) {
          a[e] += ed * npp[e];
          b[e] += weight * ed * npp[e];
          c[e] += es * npm[e] * rho[p];
        }
      }
      double* v = out.data() + kPropPerPair * k;
      for (int e = 0; e < kEntries; ++e) {
        v[e] = a[e].real();
        v[5 + e] = a[e].imag();
        v[10 + e] = b[e].real();
        v[15 + e] = b[e].imag();
        v[20 + e] = c[e].real();
        v[25 + e] = c[e].imag();
      }
    }
    return out;
  };

  std::vector<double> pbreaks;
  for (int i = 0; i <= 8; ++i) pbreaks.push_back(i / 8.0);
  const quad::Result pr = quad::integrate(prop, pbreaks, tol);

  QuadratureReport rep;
  rep.propagative_panels = pr.panels;
  rep.evaluations = pr.evaluations;
  auto note = [&](const quad::Result& r, bool propagative) {
    const Eigen::Index w = r.worst;
    const double ratio = r.error(w) / r.tolerance(w);
    if (ratio >= rep.worst_ratio || rep.worst_entry.empty()) {
      rep.worst_ratio = ratio;
      rep.worst_error = r.error(w);
      rep.worst_entry = component_name(propagative, static_cast<int>(w), pairs);
    }
  };
  note(pr, true);

  // Evanescent sector, s = Im kz / k0 in [0, s_max].
  Eigen::VectorXd ev = Eigen::VectorXd::Zero(kEvanPerPair * np);
  if (!o.vacuum) {
    double sigma_min = pg[0].sigma;
    for (const auto& g : pg) sigma_min = std::min(sigma_min, g.sigma);
    const double s_max = std::max(settings.evanescent_cutoff / sigma_min, std::sqrt(99.0));
    rep.k_max_over_k0 = std::sqrt(1.0 + s_max * s_max);

    auto evan = [&](double s) {
      Eigen::VectorXd out(kEvanPerPair * np);
      const double u = std::sqrt(1.0 + s * s);
      const cdouble kz{0.0, s};
      cdouble rho[2], tau[2];
      slab_coefficients(o, kz, rho, tau);
      for (std::size_t k = 0; k < np; ++k) {
        const Bessel J = bessel_at(u * pg[k].x);
        const double kernel = std::exp(-s * pg[k].sigma);
        Entries d{}, d2{};
        for (int p = 0; p < 2; ++p) {
          const Entries n = n_entries(ps[p], u, kz, J, 1, 1);
          for (int e = 0; e < kEntries; ++e) {
            d[e] += kernel * n[e] * rho[p].imag();
            d2[e] += kernel * n[e] * rho[p].real();
          }
        }
        double* v = out.data() + kEvanPerPair * k;
        for (int e = 0; e < kEntries; ++e) {
          v[e] = d[e].real();
          v[5 + e] = d2[e].real();
        }
      }
      return out;
    };

    std::vector<double> ebreaks{0.0, s_max};
    for (double s = 1e-6; s < s_max; s *= 10) ebreaks.push_back(s);
    for (double s : pole_breakpoints(o, s_max)) ebreaks.push_back(s);
    const double sc2 = o.eps.real() - 1.0;
    if (sc2 > 0 && std::sqrt(sc2) < s_max) ebreaks.push_back(std::sqrt(sc2));
    std::sort(ebreaks.begin(), ebreaks.end());
    ebreaks.erase(std::unique(ebreaks.begin(), ebreaks.end()), ebreaks.end());

    const quad::Result er = quad::integrate(evan, ebreaks, tol);
    rep.evanescent_panels = er.panels;
    rep.evaluations += er.evaluations;
    note(er, false);
    ev = er.value;
    if (!er.converged) {
      throw QuadratureError("evanescent quadrature did not converge", rep.worst_error,
                            rep.worst_entry);
    }
  }
  if (!pr.converged) {
    throw QuadratureError("propagative quadrature did not converge", rep.worst_error,
                          rep.worst_entry);
  }

  RawResult res;
  res.report = rep;
  const double f34 = 0.75, f38 = 0.375;
  for (std::size_t k = 0; k < np; ++k) {
    Entries a{}, b{}, c{}, c2{}, d{}, d2{};
    const double* v = pr.value.data() + kPropPerPair * k;
    const double* e = ev.data() + kEvanPerPair * k;
    for (int i = 0; i < kEntries; ++i) {
      a[i] = f34 * cdouble(v[i], v[5 + i]);
      b[i] = f34 * cdouble(v[10 + i], v[15 + i]);
      c[i] = f34 * v[20 + i];
      c2[i] = f38 * v[25 + i];
      d[i] = f34 * e[i];
      d2[i] = f38 * e[5 + i];
    }
    res.integrals.push_back(
        {to_matrix(a), to_matrix(b), to_matrix(c), to_matrix(d), to_matrix(c2), to_matrix(d2)});
  }
  return res;
}

}  // namespace

void EmitterGeometry::validate() const {
  if (!(z1 > 0) || !std::isfinite(z1)) throw DomainError("z1 must be positive and finite");
  if (!(z2 > 0) || !std::isfinite(z2)) throw DomainError("z2 must be positive and finite");
  if (!(r12 >= 0) || !std::isfinite(r12)) throw DomainError("r12 must be >= 0 and finite");
}

void QuadratureSettings::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0) || !(evanescent_cutoff > 0) || max_subdivisions <= 0) {
    throw DomainError("quadrature settings must all be positive");
  }
}

Matrix3c angular_integrals_normalized(Polarization p, double u, cdouble kz, double x, int phi,
                                      int phip) {
  return to_matrix(n_entries(p, u, kz, bessel_at(u * x), phi, phip));
}

Matrix3c angular_integrals(Polarization p, double k, double omega, double r, int phi, int phip) {
  if (!(omega > 0)) throw DomainError("omega must be > 0");
  if (!(k >= 0)) throw DomainError("k must be >= 0");
  const double k0 = omega / constants::c;
  const double u = k / k0;
  const cdouble kz = u <= 1.0 ? cdouble(std::sqrt(1.0 - u * u), 0.0)
                              : cdouble(0.0, std::sqrt(u * u - 1.0));
  return angular_integrals_normalized(p, u, kz, k0 * r, phi, phip);
}

int pair_index(EmitterPair pair) {
  if (pair.q == 1 && pair.qp == 1) return 0;
  if (pair.q == 2 && pair.qp == 2) return 1;
  if (pair.q == 1 && pair.qp == 2) return 2;
  if (pair.q == 2 && pair.qp == 1) return 3;
  throw DomainError("emitter indices must be 1 or 2");
}

const PairIntegrals& CorrelatorSet::at(EmitterPair pair) const {
  return integrals[pair_index(pair)];
}

AlphaPair CorrelatorSet::alpha(EmitterPair pair) const {
  return alpha_from_integrals(at(pair), pair, omega);
}

CorrelatorSet compute_correlators(double omega, const EmitterGeometry& geometry,
                                  const SlabInputs& slab, const QuadratureSettings& settings) {
  const std::vector<EmitterPair> pairs{{1, 1}, {2, 2}, {1, 2}, {2, 1}};
  RawResult raw = integrate_pairs(omega, geometry, slab, settings, pairs);
  CorrelatorSet out;
  out.omega = omega;
  for (int i = 0; i < 4; ++i) out.integrals[i] = raw.integrals[i];
  out.report = raw.report;
  return out;
}

PairIntegrals integral_ABCD(EmitterPair pair, double omega, const EmitterGeometry& geometry,
                            const SlabInputs& slab, const QuadratureSettings& settings) {
  pair_index(pair);
  return integrate_pairs(omega, geometry, slab, settings, {pair}).integrals[0];
}

std::pair<Matrix3c, Matrix3c> integral_C2D2(EmitterPair pair, double omega,
                                            const EmitterGeometry& geometry,
                                            const SlabInputs& slab,
                                            const QuadratureSettings& settings) {
  const PairIntegrals in = integral_ABCD(pair, omega, geometry, slab, settings);
  return {in.C2, in.D2};
}

AlphaPair alpha_from_integrals(const PairIntegrals& in, EmitterPair pair, double omega) {
  AlphaPair out;
  out.alpha_W = 0.5 * (in.A.conjugate() + in.B + 2.0 * in.C);
  out.alpha_M = 0.5 * (in.A - in.B + 2.0 * in.D);
  out.pair = pair;
  out.omega = omega;
  return out;
}

AlphaPair alpha_pair(EmitterPair pair, double omega, const EmitterGeometry& geometry,
                     const SlabInputs& slab, const QuadratureSettings& settings) {
  return alpha_from_integrals(integral_ABCD(pair, omega, geometry, slab, settings), pair, omega);
}

double free_space_alpha_parallel(double r) {
  r = std::abs(r);
  if (r < 1e-2) {
    const double r2 = r * r;
    return 1.0 - r2 / 10.0 + r2 * r2 / 280.0;
  }
  return 3.0 * (std::sin(r) / (r * r * r) - std::cos(r) / (r * r));
}

double free_space_alpha_perpendicular(double r) {
  r = std::abs(r);
  if (r < 1e-2) {
    const double r2 = r * r;
    return 1.0 - r2 / 5.0 + 3.0 * r2 * r2 / 280.0;
  }
  return 1.5 * (std::sin(r) / r + std::cos(r) / (r * r) - std::sin(r) / (r * r * r));
}

Eigen::Matrix3d free_space_alpha(double omega, const Vector3d& separation) {
  if (!(omega > 0)) throw DomainError("omega must be > 0");
  const double k0 = omega / constants::c;
  const double dist = separation.norm();
  const double r = k0 * dist;
  if (dist == 0.0) return Eigen::Matrix3d::Identity();
  const Vector3d n = separation / dist;
  const Eigen::Matrix3d nn = n * n.transpose();
  return free_space_alpha_parallel(r) * nn +
         free_space_alpha_perpendicular(r) * (Eigen::Matrix3d::Identity() - nn);
}

}  // namespace noneq
