#include "noneq/sweep.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "noneq/constants.hpp"
#include "noneq/entanglement.hpp"
#include "noneq/error.hpp"

namespace noneq {

namespace {

const std::vector<std::string> kPhysicalAxes = {"omega0", "z",     "z1",    "z2",
                                                "r12",    "T_W",   "T_M",   "delta",
                                                "dipole_phi", "dipole_theta"};
const std::vector<std::string> kChannelAxes = {"ratio_AS", "n_S", "n_A"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Runs body(i) for i in [0, n) on `jobs` threads. Each index is handled exactly once.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Everything the correlators depend on; temperatures and dipoles are not part of it.
using CacheKey = std::vector<double>;

CacheKey correlator_key(const SystemConfig& c) {
  CacheKey k{c.emitters.omega0, c.geometry.z1, c.geometry.z2, c.geometry.r12,
             c.slab.slab.thickness, static_cast<double>(c.slab.material.index())};
  if (const auto* dl = std::get_if<DrudeLorentzModel>(&c.slab.material)) {
    k.insert(k.end(), {dl->eps_inf, dl->omega_l, dl->omega_r, dl->gamma});
  } else if (const auto* tc = std::get_if<TabulatedConstant>(&c.slab.material)) {
    k.insert(k.end(), {tc->eps.real(), tc->eps.imag()});
  }
  k.insert(k.end(), {c.quadrature.rel_tol, c.quadrature.abs_tol, c.quadrature.evanescent_cutoff,
                     static_cast<double>(c.quadrature.max_subdivisions)});
  return k;
}

struct CorrelatorSlot {
  std::shared_ptr<CorrelatorSet> set;
  std::string error;
};

CorrelatorSlot compute_slot(const SystemConfig& cfg) {
  CorrelatorSlot s;
  try {
    cfg.validate();
    s.set = std::make_shared<CorrelatorSet>(
        compute_correlators(cfg.emitters.omega0, cfg.geometry, cfg.slab, cfg.quadrature));
  } catch (const Error& e) {
    s.error = e.what();
  }
  return s;
}

SweepRecord record_from(const SystemConfig& cfg, const CorrelatorSet& set) {
  SweepRecord r;
  const RatesReport rep = rates_from_correlators(cfg, set);
  const Liouvillian L = build_liouvillian(rep.rates);
  const SteadyStateReport ss = steady_state(L);
  const DensityMatrix& rho = ss.rho;
  r.C = x_violation(rho) <= 1e-9 ? concurrence_x(rho).C : concurrence_general(rho);
  const CoupledBasisState cs = to_coupled(rho);
  r.rho_G = cs.G;
  r.rho_A = cs.A;
  r.rho_S = cs.S;
  r.rho_E = cs.E;
  r.rho23 = rho(1, 2);
  r.lambda = rep.rates.lambda.real();
  r.null_dimension = ss.null_dimension;
  r.quad_worst_ratio = rep.quadrature.worst_ratio;
  r.channels = rep.channels;
  if (rep.channels) r.C_closed_form = steady_concurrence(*rep.channels);
  r.valid = true;
  if (ss.singular_case) r.status = "singular";
  return r;
}

struct AngleState {
  double phi, theta;
};

AngleState angles_of(const Vector3c& d) {
  const double z = std::clamp(d(2).real(), -1.0, 1.0);
  return {std::acos(z), std::atan2(d(1).real(), d(0).real())};
}

std::vector<std::vector<double>> grid_coords(const std::vector<SweepAxis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  std::vector<std::vector<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rem = i;
    std::vector<double> c(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      c[k] = axes[k].values[rem % axes[k].values.size()];
      rem /= axes[k].values.size();
    }
    out[i] = std::move(c);
  }
  return out;
}

void check_axes(const std::vector<SweepAxis>& axes) {
  if (axes.empty() || axes.size() > 3) throw DomainError("a sweep needs one to three axes");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    axes[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (axes[i].name == axes[j].name) throw DomainError("sweep axes must be distinct");
    }
  }
}

void finish(SweepResult& res) {
  res.invalid_count = 0;
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const SweepRecord& r = res.records[i];
    if (!r.valid) {
      ++res.invalid_count;
      continue;
    }
    if (!res.argmax || r.C > res.records[*res.argmax].C) res.argmax = i;
  }
}

}  // namespace

SweepAxis SweepAxis::linear(std::string name, double min, double max, int count) {
  if (count < 1) throw DomainError("axis count must be >= 1");
  SweepAxis a{std::move(name), {}};
  for (int i = 0; i < count; ++i) {
    a.values.push_back(count == 1 ? min : min + (max - min) * i / (count - 1));
  }
  return a;
}

SweepAxis SweepAxis::logarithmic(std::string name, double min, double max, int count) {
  if (!(min > 0) || !(max > 0)) throw DomainError("log axis bounds must be positive");
  if (count < 1) throw DomainError("axis count must be >= 1");
  SweepAxis a{std::move(name), {}};
  const double l0 = std::log(min), l1 = std::log(max);
  for (int i = 0; i < count; ++i) {
    a.values.push_back(count == 1 ? min : std::exp(l0 + (l1 - l0) * i / (count - 1)));
  }
  a.values.front() = min;
  if (count > 1) a.values.back() = max;
  return a;
}

bool is_channel_axis(const std::string& name) { return contains(kChannelAxes, name); }

void SweepAxis::validate() const {
  if (!contains(kPhysicalAxes, name) && !contains(kChannelAxes, name)) {
    throw DomainError("unknown sweep axis '" + name + "'");
  }
  if (values.empty()) throw DomainError("sweep axis '" + name + "' is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) throw DomainError("sweep axis '" + name + "' has a non-finite value");
    if (i > 0 && !(v > values[i - 1])) {
      throw DomainError("sweep axis '" + name + "' is not strictly ascending");
    }
    const bool positive = name == "omega0" || name == "z" || name == "z1" || name == "z2" ||
                          name == "delta" || name == "ratio_AS";
    const bool nonneg = name == "r12" || name == "T_W" || name == "T_M" || name == "n_S" ||
                        name == "n_A";
    if ((positive && !(v > 0)) || (nonneg && !(v >= 0))) {
      throw DomainError("sweep axis '" + name + "' leaves its physical domain");
    }
  }
}

Vector3c dipole_from_angles(double phi, double theta) {
  return Vector3c(std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi));
}

void apply_parameter(SystemConfig& cfg, const std::string& name, double v) {
  if (name == "omega0") {
    cfg.emitters.omega0 = v;
  } else if (name == "z") {
    cfg.geometry.z1 = v;
    cfg.geometry.z2 = v;
  } else if (name == "z1") {
    cfg.geometry.z1 = v;
  } else if (name == "z2") {
    cfg.geometry.z2 = v;
  } else if (name == "r12") {
    cfg.geometry.r12 = v;
  } else if (name == "T_W") {
    cfg.T_W = v;
  } else if (name == "T_M") {
    cfg.T_M = v;
  } else if (name == "delta") {
    cfg.slab.slab.thickness = v;
  } else if (name == "dipole_phi" || name == "dipole_theta") {
    AngleState a = angles_of(cfg.emitters.dipole1);
    (name == "dipole_phi" ? a.phi : a.theta) = v;
    cfg.emitters.dipole1 = cfg.emitters.dipole2 = dipole_from_angles(a.phi, a.theta);
  } else {
    throw DomainError("unknown parameter '" + name + "'");
  }
}

SweepRecord evaluate_point(const SystemConfig& cfg) {
  const CorrelatorSlot s = compute_slot(cfg);
  if (!s.set) {
    SweepRecord r;
    r.status = s.error;
    return r;
  }
  return record_from(cfg, *s.set);
}

SweepResult grid_sweep(const SystemConfig& base, const std::vector<SweepAxis>& axes,
                       const SweepSettings& settings) {
  check_axes(axes);
  for (const auto& a : axes) {
    if (is_channel_axis(a.name)) {
      throw DomainError("channel-space axis '" + a.name + "' needs a channel sweep");
    }
  }
  SweepResult res;
  res.axes = axes;
  const auto coords = grid_coords(axes);
  const std::size_t n = coords.size();

  // Apply angles last so phi and theta combine regardless of axis order.
  std::vector<SystemConfig> cfgs(n, base);
  for (std::size_t i = 0; i < n; ++i) {
    AngleState ang = angles_of(base.emitters.dipole1);
    bool rotate = false;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      if (axes[k].name == "dipole_phi") {
        ang.phi = coords[i][k];
        rotate = true;
      } else if (axes[k].name == "dipole_theta") {
        ang.theta = coords[i][k];
        rotate = true;
      } else {
        apply_parameter(cfgs[i], axes[k].name, coords[i][k]);
      }
    }
    if (rotate) cfgs[i].emitters.dipole1 = cfgs[i].emitters.dipole2 = dipole_from_angles(ang.phi, ang.theta);
  }

  // Correlators do not depend on temperatures or dipoles: compute each distinct geometry once,
  // in first-occurrence order, so the work split never changes the output.
  std::vector<std::size_t> slot_of(n);
  std::vector<std::size_t> representative;
  if (settings.use_cache) {
    std::map<CacheKey, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, inserted] = index.emplace(correlator_key(cfgs[i]), representative.size());
      if (inserted) representative.push_back(i);
      slot_of[i] = it->second;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      slot_of[i] = i;
      representative.push_back(i);
    }
  }
  std::vector<CorrelatorSlot> slots(representative.size());
  parallel_for(slots.size(), settings.jobs,
               [&](std::size_t s) { slots[s] = compute_slot(cfgs[representative[s]]); });
  res.cache_misses = slots.size();
  res.cache_hits = n - slots.size();

  res.records.resize(n);
  parallel_for(n, settings.jobs, [&](std::size_t i) {
    const CorrelatorSlot& s = slots[slot_of[i]];
    SweepRecord r;
    if (!s.set) {
      r.status = s.error;
    } else {
      try {
        r = record_from(cfgs[i], *s.set);
      } catch (const Error& e) {
        r = SweepRecord{};
        r.status = e.what();
      }
    }
    r.coords = coords[i];
    res.records[i] = std::move(r);
  });
  finish(res);
  return res;
}

SweepResult channel_sweep(const ChannelParams& base, const std::vector<SweepAxis>& axes) {
  check_axes(axes);
  for (const auto& a : axes) {
    if (!is_channel_axis(a.name)) {
      throw DomainError("axis '" + a.name + "' is not a channel-space parameter");
    }
  }
  if (!(base.gamma_S > 0) || !(base.gamma_A > 0)) throw DomainError("channel rates must be > 0");
  SweepResult res;
  res.axes = axes;
  for (const auto& c : grid_coords(axes)) {
    ChannelParams ch = base;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      if (axes[k].name == "ratio_AS") ch.gamma_A = c[k] * ch.gamma_S;
      if (axes[k].name == "n_S") ch.n_S = c[k];
      if (axes[k].name == "n_A") ch.n_A = c[k];
    }
    SweepRecord r;
    r.coords = c;
    const SymmetricSteady st = symmetric_steady(ch);
    r.rho_G = st.state.G;
    r.rho_A = st.state.A;
    r.rho_S = st.state.S;
    r.rho_E = st.state.E;
    r.rho23 = st.rho23;
    r.C = steady_concurrence(ch);
    r.C_closed_form = r.C;
    r.channels = ch;
    r.null_dimension = 1;
    r.valid = true;
    res.records.push_back(std::move(r));
  }
  finish(res);
  return res;
}

SweepResult white_line_scan(const SystemConfig& base, const SweepAxis& axis,
                            const SweepSettings& settings) {
  const std::vector<std::string> allowed = {"z", "T_W", "T_M", "omega0", "r12", "delta"};
  if (!contains(allowed, axis.name)) {
    throw DomainError("white-line scans run along z, T_W, T_M, omega0, r12 or delta");
  }
  if (base.geometry.z1 != base.geometry.z2) throw DomainError("white-line scan needs z1 = z2");
  if (base.emitters.dipole1 != base.emitters.dipole2) {
    throw DomainError("white-line scan needs identical dipoles");
  }
  SweepResult res = grid_sweep(base, {axis}, settings);
  for (SweepRecord& r : res.records) {
    if (!r.valid) continue;
    if (!r.channels) {
      throw DomainError("symmetry violation at " + axis.name + " = " +
                        std::to_string(r.coords[0]));
    }
    if (std::abs(*r.C_closed_form - r.C) > settings.closed_form_tol) {
      r.valid = false;
      r.status = "closed-form concurrence disagrees with the Liouvillian steady state";
    }
  }
  res.argmax.reset();
  finish(res);
  return res;
}

SweepResult dipole_angle_scan(const SystemConfig& base, const SweepAxis& axis,
                              const SweepSettings& settings) {
  SystemConfig cfg = base;
  if (axis.name == "dipole_phi") {
    cfg.emitters.dipole1 = cfg.emitters.dipole2 = dipole_from_angles(0.0, 0.0);
  } else if (axis.name == "dipole_theta") {
    cfg.emitters.dipole1 = cfg.emitters.dipole2 = dipole_from_angles(constants::pi / 2, 0.0);
  } else {
    throw DomainError("dipole_angle_scan needs a dipole_phi or dipole_theta axis");
  }
  return grid_sweep(cfg, {axis}, settings);
}

void write_sweep_csv(std::ostream& os, const SweepResult& result, const std::string& config_hash) {
  os << "# config_hash=" << config_hash << "\n";
  for (const auto& a : result.axes) os << a.name << ",";
  os << "valid,C,rho_G,rho_A,rho_S,rho_E,re_rho23,im_rho23,lambda,gamma_A_over_gamma_S,n_S,n_A,"
        "T_S,T_A,C_closed_form,null_dimension,quad_worst_ratio,status\n";
  std::ostringstream line;
  line << std::setprecision(17);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : result.records) {
    line.str("");
    for (double c : r.coords) line << c << ",";
    const ChannelParams ch = r.channels.value_or(ChannelParams{nan, nan, nan, nan, nan, nan});
    line << (r.valid ? 1 : 0) << "," << r.C << "," << r.rho_G << "," << r.rho_A << ","
         << r.rho_S << "," << r.rho_E << "," << r.rho23.real() << "," << r.rho23.imag() << ","
         << r.lambda << "," << ch.gamma_A / ch.gamma_S << "," << ch.n_S << "," << ch.n_A << ","
         << ch.T_S << "," << ch.T_A << "," << r.C_closed_form.value_or(nan) << ","
         << r.null_dimension << "," << r.quad_worst_ratio << ",\"";
    for (char ch2 : r.status) line << (ch2 == '"' ? '\'' : (ch2 == '\n' ? ' ' : ch2));
    line << "\"\n";
    os << line.str();
  }
}

}  // namespace noneq
