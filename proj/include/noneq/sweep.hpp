#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noneq/dynamics.hpp"
#include "noneq/rates.hpp"

namespace noneq {

/// One sweep dimension. Physical names: omega0, z, z1, z2, r12, T_W, T_M, delta, dipole_phi,
/// dipole_theta ("z" moves both emitters). Channel-space names: ratio_AS, n_S, n_A.
struct SweepAxis {
  std::string name;
  std::vector<double> values;

  static SweepAxis linear(std::string name, double min, double max, int count);
  static SweepAxis logarithmic(std::string name, double min, double max, int count);

  /// Nonempty, strictly ascending, and inside the parameter's physical domain.
  void validate() const;
};

bool is_channel_axis(const std::string& name);

struct SweepSettings {
  int jobs = 1;
  bool use_cache = true;
  /// Tolerance of the per-point check of the closed-form steady concurrence against the
  /// Liouvillian pipeline in white-line scans.
  double closed_form_tol = 1e-6;
};

struct SweepRecord {
  std::vector<double> coords;
  bool valid = false;
  std::string status = "ok";
  double C = 0;
  double rho_G = 0, rho_A = 0, rho_S = 0, rho_E = 0;
  cdouble rho23{0.0, 0.0};
  double lambda = 0;  // Re Lambda^{12} / Gamma0
  int null_dimension = 0;
  double quad_worst_ratio = 0;
  std::optional<ChannelParams> channels;
  std::optional<double> C_closed_form;  // symmetric configurations only
};

struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<SweepRecord> records;  // row-major, last axis fastest
  std::optional<std::size_t> argmax;
  int invalid_count = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
};

/// Rates -> steady state -> concurrence at every grid point of up to three physical axes.
/// Quadrature or numerical failures mark a point invalid; it stays in the output but is
/// excluded from the argmax (ties go to the first point in row-major order).
SweepResult grid_sweep(const SystemConfig& base, const std::vector<SweepAxis>& axes,
                       const SweepSettings& settings = {});

/// Sweep over channel parameters only (no quadrature). base supplies gamma_S and
/// the values of axes that are not swept; gamma_A = ratio_AS * gamma_S.
SweepResult channel_sweep(const ChannelParams& base, const std::vector<SweepAxis>& axes);

/// Scan along a symmetric configuration (z1 = z2, identical dipoles). Every record carries its
/// ChannelParams and closed-form concurrence, checked against the Liouvillian pipeline.
/// Throws DomainError if the base configuration or any point is not symmetric.
SweepResult white_line_scan(const SystemConfig& base, const SweepAxis& axis,
                            const SweepSettings& settings = {});

/// C versus dipole_phi at theta = 0, or versus dipole_theta at phi = pi/2, with both dipoles
/// rotated together.
SweepResult dipole_angle_scan(const SystemConfig& base, const SweepAxis& axis,
                              const SweepSettings& settings = {});

/// d = (sin phi cos theta, sin phi sin theta, cos phi).
Vector3c dipole_from_angles(double phi, double theta);

/// Applies one named parameter to a configuration.
void apply_parameter(SystemConfig& cfg, const std::string& name, double value);

/// Rates, steady state and concurrence of a single configuration.
SweepRecord evaluate_point(const SystemConfig& cfg);

/// One header comment line with the config hash, then a header row (axis names, observables),
/// then one row per record with 17 significant digits.
void write_sweep_csv(std::ostream& os, const SweepResult& result, const std::string& config_hash);

}  // namespace noneq
