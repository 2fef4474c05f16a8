#include "noneq/cli/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>
#include <json.hpp>

#include "noneq/error.hpp"

namespace noneq::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const YAML::Node& node, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

double read_double(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) throw ConfigError(path, "expected a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, "expected a number, got '" + n.Scalar() + "'");
  }
}

int read_int(const YAML::Node& n, const std::string& path) {
  const double v = read_double(n, path);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(path, "expected an integer");
  return static_cast<int>(v);
}

bool read_bool(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) throw ConfigError(path, "expected true or false");
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, "expected true or false, got '" + n.Scalar() + "'");
  }
}

std::string read_string(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) throw ConfigError(path, "expected a string");
  return n.Scalar();
}

// A complex entry is either a plain number or a [re, im] pair.
cdouble read_complex(const YAML::Node& n, const std::string& path) {
  if (n.IsSequence()) {
    if (n.size() != 2) throw ConfigError(path, "expected [re, im]");
    return {read_double(n[0], path + "[0]"), read_double(n[1], path + "[1]")};
  }
  return read_double(n, path);
}

Vector3c read_vector3(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence() || n.size() != 3) throw ConfigError(path, "expected a 3-vector");
  Vector3c v;
  for (int i = 0; i < 3; ++i) v(i) = read_complex(n[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix4c read_matrix4(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence() || n.size() != 4) throw ConfigError(path, "expected 4 rows");
  Matrix4c m;
  for (int i = 0; i < 4; ++i) {
    const auto row = n[i];
    const auto rp = path + "[" + std::to_string(i) + "]";
    if (!row.IsSequence() || row.size() != 4) throw ConfigError(rp, "expected 4 entries");
    for (int j = 0; j < 4; ++j) m(i, j) = read_double(row[j], rp + "[" + std::to_string(j) + "]");
  }
  return m;
}

template <class F>
void if_present(const YAML::Node& parent, const std::string& key, F&& f) {
  const YAML::Node n = parent[key];
  if (n) f(n);
}

std::string material_kind(const PermittivityModel& m) {
  if (std::holds_alternative<Vacuum>(m)) return "vacuum";
  if (std::holds_alternative<TabulatedConstant>(m)) return "constant";
  return "drude_lorentz";
}

void parse_material(const YAML::Node& n, RunConfig& cfg) {
  check_keys(n, "material", {"kind", "eps_inf", "omega_l", "omega_r", "gamma", "eps_re", "eps_im"});
  std::string kind = material_kind(cfg.system.slab.material);
  if_present(n, "kind", [&](auto v) { kind = read_string(v, "material.kind"); });

  if (kind == "sic" || kind == "drude_lorentz") {
    DrudeLorentzModel dl = silicon_carbide;
    if (auto* cur = std::get_if<DrudeLorentzModel>(&cfg.system.slab.material); cur && kind != "sic") {
      dl = *cur;
    }
    if_present(n, "eps_inf", [&](auto v) { dl.eps_inf = read_double(v, "material.eps_inf"); });
    if_present(n, "omega_l", [&](auto v) { dl.omega_l = read_double(v, "material.omega_l"); });
    if_present(n, "omega_r", [&](auto v) { dl.omega_r = read_double(v, "material.omega_r"); });
    if_present(n, "gamma", [&](auto v) { dl.gamma = read_double(v, "material.gamma"); });
    cfg.system.slab.material = dl;
  } else if (kind == "vacuum") {
    cfg.system.slab.material = Vacuum{};
  } else if (kind == "constant") {
    double re = 1.0, im = 0.0;
    if_present(n, "eps_re", [&](auto v) { re = read_double(v, "material.eps_re"); });
    if_present(n, "eps_im", [&](auto v) { im = read_double(v, "material.eps_im"); });
    cfg.system.slab.material = TabulatedConstant{{re, im}};
  } else {
    throw ConfigError("material.kind",
                      "unknown kind '" + kind + "' (expected sic, drude_lorentz, vacuum, constant)");
  }
}

void parse_sweep(const YAML::Node& n, SweepSection& s) {
  check_keys(n, "sweep", {"mode", "axes", "gamma_S", "ratio_AS", "n_S", "n_A"});
  if_present(n, "mode", [&](auto v) { s.mode = read_string(v, "sweep.mode"); });
  if_present(n, "gamma_S", [&](auto v) { s.gamma_S = read_double(v, "sweep.gamma_S"); });
  if_present(n, "ratio_AS", [&](auto v) { s.ratio_AS = read_double(v, "sweep.ratio_AS"); });
  if_present(n, "n_S", [&](auto v) { s.n_S = read_double(v, "sweep.n_S"); });
  if_present(n, "n_A", [&](auto v) { s.n_A = read_double(v, "sweep.n_A"); });
  if_present(n, "axes", [&](auto axes) {
    if (!axes.IsSequence()) throw ConfigError("sweep.axes", "expected a list");
    s.axes.clear();
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const auto p = "sweep.axes[" + std::to_string(i) + "]";
      const auto a = axes[i];
      check_keys(a, p, {"name", "min", "max", "count", "scale"});
      AxisSpec spec;
      if (!a["name"]) throw ConfigError(p + ".name", "missing");
      spec.name = read_string(a["name"], p + ".name");
      if (!a["min"]) throw ConfigError(p + ".min", "missing");
      spec.min = read_double(a["min"], p + ".min");
      spec.max = spec.min;
      spec.count = 1;
      if_present(a, "max", [&](auto v) { spec.max = read_double(v, p + ".max"); });
      if_present(a, "count", [&](auto v) { spec.count = read_int(v, p + ".count"); });
      if_present(a, "scale", [&](auto v) { spec.scale = read_string(v, p + ".scale"); });
      s.axes.push_back(spec);
    }
  });
}

void parse_dynamics(const YAML::Node& n, DynamicsSection& d) {
  check_keys(n, "dynamics",
             {"initial", "t_max", "n_points", "include_bare_hamiltonian", "omega0_over_gamma0",
              "x_fast_path", "rho0"});
  if_present(n, "initial", [&](auto v) { d.initial = read_string(v, "dynamics.initial"); });
  if_present(n, "t_max", [&](auto v) { d.t_max = read_double(v, "dynamics.t_max"); });
  if_present(n, "n_points", [&](auto v) { d.n_points = read_int(v, "dynamics.n_points"); });
  if_present(n, "include_bare_hamiltonian", [&](auto v) {
    d.include_bare_hamiltonian = read_bool(v, "dynamics.include_bare_hamiltonian");
  });
  if_present(n, "omega0_over_gamma0", [&](auto v) {
    d.omega0_over_gamma0 = read_double(v, "dynamics.omega0_over_gamma0");
  });
  if_present(n, "x_fast_path", [&](auto v) { d.x_fast_path = read_bool(v, "dynamics.x_fast_path"); });
  if_present(n, "rho0", [&](auto v) {
    check_keys(v, "dynamics.rho0", {"re", "im"});
    if (!v["re"]) throw ConfigError("dynamics.rho0.re", "missing");
    Matrix4c re = read_matrix4(v["re"], "dynamics.rho0.re");
    Matrix4c im = Matrix4c::Zero();
    if_present(v, "im", [&](auto w) { im = read_matrix4(w, "dynamics.rho0.im"); });
    d.rho0 = DensityMatrix(re + cdouble(0, 1) * im);
  });
}

void parse_root(const YAML::Node& root, RunConfig& cfg) {
  if (!root || root.IsNull()) return;
  check_keys(root, "",
             {"material", "slab", "emitters", "bath", "quadrature", "sweep", "dynamics", "output"});
  auto& sys = cfg.system;

  if_present(root, "material", [&](auto n) { parse_material(n, cfg); });
  if_present(root, "slab", [&](auto n) {
    check_keys(n, "slab", {"thickness_m"});
    if_present(n, "thickness_m",
               [&](auto v) { sys.slab.slab.thickness = read_double(v, "slab.thickness_m"); });
  });
  if_present(root, "emitters", [&](auto n) {
    check_keys(n, "emitters",
               {"omega0_rad_s", "z1_m", "z2_m", "r12_m", "dipole1", "dipole2", "gamma0_ratio"});
    if_present(n, "omega0_rad_s",
               [&](auto v) { sys.emitters.omega0 = read_double(v, "emitters.omega0_rad_s"); });
    if_present(n, "z1_m", [&](auto v) { sys.geometry.z1 = read_double(v, "emitters.z1_m"); });
    if_present(n, "z2_m", [&](auto v) { sys.geometry.z2 = read_double(v, "emitters.z2_m"); });
    if_present(n, "r12_m", [&](auto v) { sys.geometry.r12 = read_double(v, "emitters.r12_m"); });
    if_present(n, "dipole1",
               [&](auto v) { sys.emitters.dipole1 = read_vector3(v, "emitters.dipole1"); });
    if_present(n, "dipole2",
               [&](auto v) { sys.emitters.dipole2 = read_vector3(v, "emitters.dipole2"); });
    if_present(n, "gamma0_ratio",
               [&](auto v) { sys.emitters.gamma0_ratio = read_double(v, "emitters.gamma0_ratio"); });
  });
  if_present(root, "bath", [&](auto n) {
    check_keys(n, "bath", {"T_W_K", "T_M_K"});
    if_present(n, "T_W_K", [&](auto v) { sys.T_W = read_double(v, "bath.T_W_K"); });
    if_present(n, "T_M_K", [&](auto v) { sys.T_M = read_double(v, "bath.T_M_K"); });
  });
  if_present(root, "quadrature", [&](auto n) {
    check_keys(n, "quadrature", {"rel_tol", "abs_tol", "evanescent_cutoff", "max_subdivisions"});
    auto& q = sys.quadrature;
    if_present(n, "rel_tol", [&](auto v) { q.rel_tol = read_double(v, "quadrature.rel_tol"); });
    if_present(n, "abs_tol", [&](auto v) { q.abs_tol = read_double(v, "quadrature.abs_tol"); });
    if_present(n, "evanescent_cutoff", [&](auto v) {
      q.evanescent_cutoff = read_double(v, "quadrature.evanescent_cutoff");
    });
    if_present(n, "max_subdivisions", [&](auto v) {
      q.max_subdivisions = read_int(v, "quadrature.max_subdivisions");
    });
  });
  if_present(root, "sweep", [&](auto n) { parse_sweep(n, cfg.sweep); });
  if_present(root, "dynamics", [&](auto n) { parse_dynamics(n, cfg.dynamics); });
  if_present(root, "output", [&](auto n) {
    check_keys(n, "output", {"path", "format"});
    if_present(n, "path", [&](auto v) { cfg.output.path = read_string(v, "output.path"); });
    if_present(n, "format", [&](auto v) { cfg.output.format = read_string(v, "output.format"); });
  });
}

json complex_json(cdouble z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

json vector_json(const Vector3c& v) {
  json a = json::array();
  for (int i = 0; i < 3; ++i) a.push_back(complex_json(v(i)));
  return a;
}

json matrix_json(const Eigen::Matrix4d& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json_value(const RunConfig& cfg) {
  const auto& sys = cfg.system;
  json j;

  json mat;
  mat["kind"] = material_kind(sys.slab.material);
  if (const auto* dl = std::get_if<DrudeLorentzModel>(&sys.slab.material)) {
    mat["eps_inf"] = dl->eps_inf;
    mat["omega_l"] = dl->omega_l;
    mat["omega_r"] = dl->omega_r;
    mat["gamma"] = dl->gamma;
  } else if (const auto* tc = std::get_if<TabulatedConstant>(&sys.slab.material)) {
    mat["eps_re"] = tc->eps.real();
    mat["eps_im"] = tc->eps.imag();
  }
  j["material"] = mat;
  j["slab"] = {{"thickness_m", sys.slab.slab.thickness}};
  j["emitters"] = {{"omega0_rad_s", sys.emitters.omega0},
                   {"z1_m", sys.geometry.z1},
                   {"z2_m", sys.geometry.z2},
                   {"r12_m", sys.geometry.r12},
                   {"dipole1", vector_json(sys.emitters.dipole1)},
                   {"dipole2", vector_json(sys.emitters.dipole2)},
                   {"gamma0_ratio", sys.emitters.gamma0_ratio}};
  j["bath"] = {{"T_W_K", sys.T_W}, {"T_M_K", sys.T_M}};
  j["quadrature"] = {{"rel_tol", sys.quadrature.rel_tol},
                     {"abs_tol", sys.quadrature.abs_tol},
                     {"evanescent_cutoff", sys.quadrature.evanescent_cutoff},
                     {"max_subdivisions", sys.quadrature.max_subdivisions}};

  json axes = json::array();
  for (const auto& a : cfg.sweep.axes) {
    axes.push_back(
        {{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count}, {"scale", a.scale}});
  }
  j["sweep"] = {{"mode", cfg.sweep.mode},     {"axes", axes},
                {"gamma_S", cfg.sweep.gamma_S}, {"ratio_AS", cfg.sweep.ratio_AS},
                {"n_S", cfg.sweep.n_S},         {"n_A", cfg.sweep.n_A}};

  json dyn = {{"initial", cfg.dynamics.initial},
              {"t_max", cfg.dynamics.t_max},
              {"n_points", cfg.dynamics.n_points},
              {"include_bare_hamiltonian", cfg.dynamics.include_bare_hamiltonian},
              {"omega0_over_gamma0", cfg.dynamics.omega0_over_gamma0},
              {"x_fast_path", cfg.dynamics.x_fast_path}};
  if (cfg.dynamics.rho0) {
    dyn["rho0"] = {{"re", matrix_json(cfg.dynamics.rho0->real())},
                   {"im", matrix_json(cfg.dynamics.rho0->imag())}};
  }
  j["dynamics"] = dyn;
  j["output"] = {{"path", cfg.output.path}, {"format", cfg.output.format}};
  return j;
}

YAML::Node to_yaml_node(const json& j) {
  YAML::Node n;
  switch (j.type()) {
    case json::value_t::object:
      n = YAML::Node(YAML::NodeType::Map);
      for (const auto& [k, v] : j.items()) n[k] = to_yaml_node(v);
      break;
    case json::value_t::array:
      n = YAML::Node(YAML::NodeType::Sequence);
      for (const auto& v : j) n.push_back(to_yaml_node(v));
      break;
    case json::value_t::string:
      n = j.get<std::string>();
      break;
    case json::value_t::boolean:
      n = j.get<bool>();
      break;
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      n = j.get<long long>();
      break;
    case json::value_t::number_float:
      n = j.get<double>();
      break;
    default:
      break;
  }
  return n;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0; }

}  // namespace

RunConfig default_config() {
  RunConfig cfg;
  auto& sys = cfg.system;
  sys.slab.material = silicon_carbide;
  sys.slab.slab.thickness = 0.01e-6;
  sys.geometry = {1.04e-6, 1.04e-6, 0.01e-6};
  sys.emitters.omega0 = 0.3 * silicon_carbide.omega_r;
  sys.emitters.dipole1 = Vector3c(0, 0, 1);
  sys.emitters.dipole2 = Vector3c(0, 0, 1);
  sys.emitters.gamma0_ratio = 1.0;
  sys.T_W = 30.0;
  sys.T_M = 1215.0;
  return cfg;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  RunConfig cfg = default_config();
  parse_root(root, cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  const auto& sys = cfg.system;

  if (const auto* dl = std::get_if<DrudeLorentzModel>(&sys.slab.material)) {
    require(finite_positive(dl->eps_inf), "material.eps_inf", "must be positive");
    require(finite_positive(dl->omega_r), "material.omega_r", "must be positive");
    require(finite_positive(dl->gamma), "material.gamma", "must be positive");
    require(finite_positive(dl->omega_l) && dl->omega_l > dl->omega_r, "material.omega_l",
            "must exceed omega_r");
  } else if (const auto* tc = std::get_if<TabulatedConstant>(&sys.slab.material)) {
    require(std::isfinite(tc->eps.real()), "material.eps_re", "must be finite");
    require(std::isfinite(tc->eps.imag()) && tc->eps.imag() >= 0, "material.eps_im",
            "must be finite and >= 0");
  }
  if (!is_vacuum(sys.slab.material)) {
    require(finite_positive(sys.slab.slab.thickness), "slab.thickness_m", "must be positive");
  }

  require(finite_positive(sys.emitters.omega0), "emitters.omega0_rad_s", "must be positive");
  require(finite_positive(sys.geometry.z1), "emitters.z1_m", "must be positive");
  require(finite_positive(sys.geometry.z2), "emitters.z2_m", "must be positive");
  require(std::isfinite(sys.geometry.r12) && sys.geometry.r12 >= 0, "emitters.r12_m",
          "must be >= 0");
  require(!(sys.geometry.r12 == 0 && sys.geometry.z1 == sys.geometry.z2), "emitters.r12_m",
          "the two emitters coincide");
  require(std::abs(sys.emitters.dipole1.norm() - 1.0) <= 1e-9, "emitters.dipole1",
          "must be a unit vector");
  require(std::abs(sys.emitters.dipole2.norm() - 1.0) <= 1e-9, "emitters.dipole2",
          "must be a unit vector");
  require(finite_positive(sys.emitters.gamma0_ratio), "emitters.gamma0_ratio", "must be positive");
  require(std::isfinite(sys.T_W) && sys.T_W >= 0, "bath.T_W_K", "must be >= 0");
  require(std::isfinite(sys.T_M) && sys.T_M >= 0, "bath.T_M_K", "must be >= 0");

  const auto& q = sys.quadrature;
  require(finite_positive(q.rel_tol), "quadrature.rel_tol", "must be positive");
  require(finite_positive(q.abs_tol), "quadrature.abs_tol", "must be positive");
  require(finite_positive(q.evanescent_cutoff), "quadrature.evanescent_cutoff",
          "must be positive");
  require(q.max_subdivisions > 0, "quadrature.max_subdivisions", "must be positive");

  const auto& s = cfg.sweep;
  require(s.mode == "grid" || s.mode == "white_line" || s.mode == "dipole_angle" ||
              s.mode == "channel",
          "sweep.mode", "expected grid, white_line, dipole_angle or channel");
  for (std::size_t i = 0; i < s.axes.size(); ++i) {
    const auto p = "sweep.axes[" + std::to_string(i) + "]";
    const auto& a = s.axes[i];
    require(a.count >= 1, p + ".count", "must be >= 1");
    require(a.scale == "linear" || a.scale == "log", p + ".scale", "expected linear or log");
    require(std::isfinite(a.min) && std::isfinite(a.max), p, "bounds must be finite");
    require(a.count == 1 || a.max > a.min, p + ".max", "must exceed min");
    require(a.scale != "log" || a.min > 0, p + ".min", "log axes need min > 0");
    require(is_channel_axis(a.name) == (s.mode == "channel"), p + ".name",
            "axis '" + a.name + "' does not belong to sweep mode " + s.mode);
  }
  require((s.mode != "white_line" && s.mode != "dipole_angle") || s.axes.size() <= 1, "sweep.axes",
          "this mode takes a single axis");
  require(s.axes.size() <= 3, "sweep.axes", "at most three axes");
  require(finite_positive(s.gamma_S), "sweep.gamma_S", "must be positive");
  require(finite_positive(s.ratio_AS), "sweep.ratio_AS", "must be positive");
  require(std::isfinite(s.n_S) && s.n_S >= 0, "sweep.n_S", "must be >= 0");
  require(std::isfinite(s.n_A) && s.n_A >= 0, "sweep.n_A", "must be >= 0");
  try {
    for (const auto& a : build_axes(s)) a.validate();
  } catch (const DomainError& e) {
    throw ConfigError("sweep.axes", e.what());
  }

  const auto& d = cfg.dynamics;
  require(finite_positive(d.t_max), "dynamics.t_max", "must be positive");
  require(d.n_points >= 2, "dynamics.n_points", "must be >= 2");
  require(!d.include_bare_hamiltonian || finite_positive(d.omega0_over_gamma0),
          "dynamics.omega0_over_gamma0", "must be positive when the bare Hamiltonian is included");
  if (d.rho0) {
    try {
      validate_density_matrix(*d.rho0, 1e-10);
    } catch (const DomainError& e) {
      throw ConfigError("dynamics.rho0", e.what());
    }
  } else {
    try {
      (void)named_state(d.initial);
    } catch (const DomainError& e) {
      throw ConfigError("dynamics.initial", e.what());
    }
  }

  const auto& f = cfg.output.format;
  require(f.empty() || f == "csv" || f == "json", "output.format", "expected csv or json");

  try {
    sys.validate();
  } catch (const DomainError& e) {
    throw ConfigError("<config>", e.what());
  }
}

std::string to_json(const RunConfig& cfg) { return to_json_value(cfg).dump(2); }

std::string to_yaml(const RunConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << to_yaml_node(to_json_value(cfg));
  return std::string(out.c_str()) + "\n";
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = to_json_value(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_environment(RunConfig& cfg) {
  const char* v = std::getenv("NONEQ_QUAD_RTOL");
  if (!v || !*v) return;
  char* end = nullptr;
  const double r = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(r > 0) || !std::isfinite(r)) {
    throw ConfigError("NONEQ_QUAD_RTOL", std::string("not a positive number: '") + v + "'");
  }
  cfg.system.quadrature.rel_tol = r;
}

std::vector<SweepAxis> build_axes(const SweepSection& s) {
  std::vector<SweepAxis> axes;
  for (const auto& a : s.axes) {
    axes.push_back(a.scale == "log" ? SweepAxis::logarithmic(a.name, a.min, a.max, a.count)
                                    : SweepAxis::linear(a.name, a.min, a.max, a.count));
  }
  return axes;
}

}  // namespace noneq::cli
