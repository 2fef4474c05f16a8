#pragma once

#include <optional>
#include <string>
#include <vector>

#include "noneq/rates.hpp"
#include "noneq/sweep.hpp"

namespace noneq::cli {

struct AxisSpec {
  std::string name;
  double min = 0;
  double max = 0;
  int count = 1;
  std::string scale = "linear";  // linear | log
};

struct SweepSection {
  std::string mode = "grid";  // grid | white_line | dipole_angle | channel
  std::vector<AxisSpec> axes;
  // Base point of channel-space sweeps.
  double gamma_S = 1.0;
  double ratio_AS = 1e-6;
  double n_S = 1e-3;
  double n_A = 1.0;
};

struct DynamicsSection {
  std::string initial = "A";
  double t_max = 1.0;
  int n_points = 101;
  bool include_bare_hamiltonian = false;
  double omega0_over_gamma0 = 0.0;  // only used with the bare Hamiltonian
  bool x_fast_path = false;
  std::optional<DensityMatrix> rho0;  // overrides `initial` when present
};

struct OutputSection {
  std::string path;           // empty: standard output
  std::string format = "";    // csv | json; empty picks the command's default
};

/// Everything a run needs, in SI units (m, K, rad/s).
struct RunConfig {
  SystemConfig system;
  SweepSection sweep;
  DynamicsSection dynamics;
  OutputSection output;
};

/// Configuration with the SiC working point (omega = 0.3 omega_r, delta = 0.01 um,
/// z1 = z2 = 1.04 um, r12 = 0.01 um, dipoles along z, T_W = 30 K, T_M = 1215 K).
RunConfig default_config();

/// Parses YAML (or JSON, which the YAML reader also accepts). Missing keys keep the
/// defaults; unknown keys and wrong types are ConfigErrors naming the key path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Checks every physical bound; throws ConfigError with the offending key.
void validate(const RunConfig& cfg);

/// Canonical JSON text (sorted keys, 17 significant digits).
std::string to_json(const RunConfig& cfg);
std::string to_yaml(const RunConfig& cfg);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Applies NONEQ_QUAD_RTOL when it is set.
void apply_environment(RunConfig& cfg);

std::vector<SweepAxis> build_axes(const SweepSection& s);

}  // namespace noneq::cli
