#include "noneq/cli/commands.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "noneq/dynamics.hpp"
#include "noneq/entanglement.hpp"
#include "noneq/error.hpp"

namespace noneq::cli {

using nlohmann::json;

namespace {

// NaN and infinities have no JSON literal; they become null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json cjson(cdouble z) { return json::array({num(z.real()), num(z.imag())}); }

json matrix2_json(const Matrix2c& m) {
  return {{"11", cjson(m(0, 0))}, {"12", cjson(m(0, 1))}, {"21", cjson(m(1, 0))},
          {"22", cjson(m(1, 1))}};
}

json channels_json(const ChannelParams& ch) {
  return {{"gamma_S", num(ch.gamma_S)}, {"gamma_A", num(ch.gamma_A)},
          {"gamma_A_over_gamma_S", num(ch.gamma_A / ch.gamma_S)},
          {"n_S", num(ch.n_S)},         {"n_A", num(ch.n_A)},
          {"T_S_K", num(ch.T_S)},       {"T_A_K", num(ch.T_A)}};
}

json quadrature_json(const QuadratureReport& q) {
  return {{"propagative_panels", q.propagative_panels},
          {"evanescent_panels", q.evanescent_panels},
          {"evaluations", q.evaluations},
          {"worst_error", num(q.worst_error)},
          {"worst_ratio", num(q.worst_ratio)},
          {"worst_entry", q.worst_entry},
          {"k_max_over_k0", num(q.k_max_over_k0)}};
}

void dump(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

void csv_line(std::ostream& out, const std::string& name, cdouble z) {
  out << name << ',' << z.real() << ',' << z.imag() << '\n';
}

std::string pick(const std::string& format, const RunConfig& cfg, const std::string& fallback) {
  if (!format.empty()) return format;
  if (!cfg.output.format.empty()) return cfg.output.format;
  return fallback;
}

DensityMatrix initial_state(const DynamicsSection& d) {
  return d.rho0 ? *d.rho0 : named_state(d.initial);
}

double concurrence_any(const DensityMatrix& rho) {
  return x_violation(rho) <= 1e-9 ? concurrence_x(rho).C : concurrence_general(rho);
}

json record_json(const SweepRecord& r) {
  json j = {{"coords", r.coords},
            {"valid", r.valid},
            {"status", r.status},
            {"C", num(r.C)},
            {"rho_G", num(r.rho_G)},
            {"rho_A", num(r.rho_A)},
            {"rho_S", num(r.rho_S)},
            {"rho_E", num(r.rho_E)},
            {"rho23", cjson(r.rho23)},
            {"lambda", num(r.lambda)},
            {"null_dimension", r.null_dimension},
            {"quad_worst_ratio", num(r.quad_worst_ratio)}};
  if (r.channels) j["channels"] = channels_json(*r.channels);
  if (r.C_closed_form) j["C_closed_form"] = num(*r.C_closed_form);
  return j;
}

json summary_json(const RunConfig& cfg, const SweepResult& res) {
  json axes = json::array();
  for (const auto& a : res.axes) {
    axes.push_back({{"name", a.name}, {"count", a.values.size()},
                    {"min", a.values.front()}, {"max", a.values.back()}});
  }
  json j;
  j["config_hash"] = config_hash(cfg);
  j["mode"] = cfg.sweep.mode;
  j["parameters"] = {{"axes", axes}, {"points", res.records.size()}};
  j["diagnostics"] = {{"invalid_points", res.invalid_count},
                      {"cache_hits", res.cache_hits},
                      {"cache_misses", res.cache_misses}};
  if (res.argmax) {
    const auto& r = res.records[*res.argmax];
    json coords;
    for (std::size_t i = 0; i < res.axes.size(); ++i) coords[res.axes[i].name] = r.coords[i];
    j["argmax"] = {{"index", *res.argmax}, {"coords", coords}, {"C", num(r.C)}};
  } else {
    j["argmax"] = nullptr;
  }
  return j;
}

}  // namespace

void cmd_rates(const RunConfig& cfg, const std::string& format, std::ostream& out) {
  const auto rep = compute_rates(cfg.system);
  const std::string fmt = pick(format, cfg, "json");
  const bool equilibrium = cfg.system.T_W == cfg.system.T_M;

  if (fmt == "csv") {
    out << "# config_hash=" << config_hash(cfg) << "\n";
    out << std::setprecision(17) << "quantity,re,im\n";
    const char* idx[2] = {"1", "2"};
    for (int q = 0; q < 2; ++q) {
      for (int p = 0; p < 2; ++p) {
        csv_line(out, std::string("gamma_down_") + idx[q] + idx[p], rep.rates.gamma_down(q, p));
        csv_line(out, std::string("gamma_up_") + idx[q] + idx[p], rep.rates.gamma_up(q, p));
      }
    }
    csv_line(out, "lambda_12", rep.rates.lambda);
    csv_line(out, "n_W", rep.n_W);
    csv_line(out, "n_M", rep.n_M);
    if (rep.channels) {
      csv_line(out, "gamma_S", rep.channels->gamma_S);
      csv_line(out, "gamma_A", rep.channels->gamma_A);
      csv_line(out, "n_S", rep.channels->n_S);
      csv_line(out, "n_A", rep.channels->n_A);
      csv_line(out, "T_S_K", rep.channels->T_S);
      csv_line(out, "T_A_K", rep.channels->T_A);
    }
    if (equilibrium) {
      csv_line(out, "detailed_balance_up_over_down",
               rep.rates.gamma_up(0, 0) / rep.rates.gamma_down(0, 0));
      csv_line(out, "detailed_balance_n_over_1_plus_n", rep.n_W / (1.0 + rep.n_W));
    }
    return;
  }

  json j;
  j["config_hash"] = config_hash(cfg);
  j["omega0_rad_s"] = cfg.system.emitters.omega0;
  j["gamma_down"] = matrix2_json(rep.rates.gamma_down);
  j["gamma_up"] = matrix2_json(rep.rates.gamma_up);
  j["lambda_12"] = cjson(rep.rates.lambda);
  j["alpha_W"] = matrix2_json(rep.alphas.W);
  j["alpha_M"] = matrix2_json(rep.alphas.M);
  j["n_W"] = num(rep.n_W);
  j["n_M"] = num(rep.n_M);
  j["channels"] = rep.channels ? channels_json(*rep.channels) : json(nullptr);
  if (equilibrium) {
    j["detailed_balance"] = {
        {"up_over_down_11", cjson(rep.rates.gamma_up(0, 0) / rep.rates.gamma_down(0, 0))},
        {"n_over_1_plus_n", num(rep.n_W / (1.0 + rep.n_W))}};
  }
  j["quadrature"] = quadrature_json(rep.quadrature);
  dump(out, j);
}

void cmd_dynamics(const RunConfig& cfg, const std::string& format, std::ostream& out) {
  const auto& d = cfg.dynamics;
  const DensityMatrix rho0 = initial_state(d);
  const auto rep = compute_rates(cfg.system);
  const auto L = build_liouvillian(rep.rates, d.omega0_over_gamma0, d.include_bare_hamiltonian);

  std::vector<double> t(d.n_points);
  for (int i = 0; i < d.n_points; ++i) t[i] = d.t_max * i / (d.n_points - 1);
  EvolveOptions opt;
  opt.x_fast_path = d.x_fast_path;
  const auto traj = evolve(L, rho0, t, opt);

  const std::string fmt = pick(format, cfg, "csv");
  if (fmt == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const auto s = to_coupled(traj[i]);
      rows.push_back({{"t", t[i]},
                      {"rho_G", s.G},
                      {"rho_A", s.A},
                      {"rho_S", s.S},
                      {"rho_E", s.E},
                      {"rho_23", cjson(traj[i](1, 2))},
                      {"rho_14", cjson(traj[i](0, 3))},
                      {"concurrence", concurrence_any(traj[i])}});
    }
    dump(out, {{"config_hash", config_hash(cfg)},
               {"lambda_12", cjson(rep.rates.lambda)},
               {"trajectory", rows}});
    return;
  }

  out << "# config_hash=" << config_hash(cfg) << "\n";
  out << "t,rho_G,rho_A,rho_S,rho_E,re_rho_23,im_rho_23,re_rho_14,im_rho_14,concurrence\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& r = traj[i];
    const auto s = to_coupled(r);
    out << t[i] << ',' << s.G << ',' << s.A << ',' << s.S << ',' << s.E << ',' << r(1, 2).real()
        << ',' << r(1, 2).imag() << ',' << r(0, 3).real() << ',' << r(0, 3).imag() << ','
        << concurrence_any(r) << '\n';
  }
}

void cmd_steady(const RunConfig& cfg, const std::string& format, std::ostream& out) {
  const std::string fmt = pick(format, cfg, "json");
  if (fmt == "csv") {
    SweepResult res;
    res.records.push_back(evaluate_point(cfg.system));
    write_sweep_csv(out, res, config_hash(cfg));
    return;
  }

  const auto rep = compute_rates(cfg.system);
  const auto L = build_liouvillian(rep.rates);
  const DensityMatrix rho0 = initial_state(cfg.dynamics);
  const auto ss = steady_state(L, &rho0);
  const auto c = to_coupled(ss.rho);
  const auto conc = concurrence_x(ss.rho);

  json j;
  j["config_hash"] = config_hash(cfg);
  j["decoupled"] = {{"rho_11", num(ss.rho(0, 0).real())},
                    {"rho_22", num(ss.rho(1, 1).real())},
                    {"rho_33", num(ss.rho(2, 2).real())},
                    {"rho_44", num(ss.rho(3, 3).real())},
                    {"rho_23", cjson(ss.rho(1, 2))},
                    {"rho_14", cjson(ss.rho(0, 3))}};
  j["coupled"] = {{"rho_G", num(c.G)}, {"rho_A", num(c.A)}, {"rho_S", num(c.S)},
                  {"rho_E", num(c.E)}, {"rho_AS", cjson(c.AS)}, {"rho_GE", cjson(c.GE)}};
  j["concurrence"] = {{"C", num(conc.C)}, {"K1", num(conc.K1)}, {"K2", num(conc.K2)}};
  if (rep.channels) {
    j["channels"] = channels_json(*rep.channels);
    j["concurrence"]["C_closed_form"] = num(steady_concurrence(*rep.channels));
  }
  j["lambda_12"] = cjson(rep.rates.lambda);
  j["diagnostics"] = {{"null_dimension", ss.null_dimension},
                      {"singular_case", ss.singular_case},
                      {"rank_ambiguous", ss.rank_ambiguous},
                      {"smallest_singular_value", num(ss.smallest_singular_value)},
                      {"second_singular_value", num(ss.second_singular_value)},
                      {"quadrature", quadrature_json(rep.quadrature)}};
  dump(out, j);
}

SweepResult run_sweep(const RunConfig& cfg, int jobs) {
  const auto axes = build_axes(cfg.sweep);
  SweepSettings settings;
  settings.jobs = jobs;
  const auto& mode = cfg.sweep.mode;
  if (mode == "channel") {
    const auto& s = cfg.sweep;
    ChannelParams base{s.gamma_S, s.ratio_AS * s.gamma_S, s.n_S, s.n_A,
                       std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN()};
    return channel_sweep(base, axes);
  }
  if (mode == "white_line" || mode == "dipole_angle") {
    if (axes.size() != 1) throw ConfigError("sweep.axes", "this mode takes exactly one axis");
    return mode == "white_line" ? white_line_scan(cfg.system, axes[0], settings)
                                : dipole_angle_scan(cfg.system, axes[0], settings);
  }
  return grid_sweep(cfg.system, axes, settings);
}

void cmd_sweep(const RunConfig& cfg, int jobs, const std::string& format, std::ostream& out,
               std::ostream* summary) {
  const auto res = run_sweep(cfg, jobs);
  const std::string fmt = pick(format, cfg, "csv");
  if (fmt == "json") {
    json j = summary_json(cfg, res);
    json recs = json::array();
    for (const auto& r : res.records) recs.push_back(record_json(r));
    j["records"] = recs;
    dump(out, j);
  } else {
    write_sweep_csv(out, res, config_hash(cfg));
  }
  if (summary) dump(*summary, summary_json(cfg, res));
}

}  // namespace noneq::cli
