#pragma once

#include <iosfwd>
#include <string>

#include "noneq/cli/config.hpp"

namespace noneq::cli {

/// Γ^{qq'}(±ω), Λ12, photon numbers and (symmetric case) channel parameters.
void cmd_rates(const RunConfig& cfg, const std::string& format, std::ostream& out);

/// Trajectory with columns t, rho_G, rho_A, rho_S, rho_E, re/im rho_23, re/im rho_14,
/// concurrence.
void cmd_dynamics(const RunConfig& cfg, const std::string& format, std::ostream& out);

/// Steady state in both bases, rho_23, concurrence and degeneracy diagnostics. The CSV form is
/// a single sweep record.
void cmd_steady(const RunConfig& cfg, const std::string& format, std::ostream& out);

/// Runs the configured sweep. CSV goes to out; with format json, out gets the summary with all
/// records. When summary is non-null it receives the JSON summary without records.
void cmd_sweep(const RunConfig& cfg, int jobs, const std::string& format, std::ostream& out,
               std::ostream* summary);

SweepResult run_sweep(const RunConfig& cfg, int jobs);

}  // namespace noneq::cli
