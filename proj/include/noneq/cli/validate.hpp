#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "noneq/correlators.hpp"

namespace noneq::cli {

struct Check {
  std::string name;
  bool passed = false;
  double measured = 0;
  double tolerance = 0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;
  bool all_passed() const;
};

/// level "quick": free-space oracle, equilibrium thermalization, analytic steady state and Bell
/// states. "full" adds the SiC grid and white-line reproductions.
ValidationReport run_validation(const std::string& level, const QuadratureSettings& quadrature,
                                int jobs = 1);

void print_report(const ValidationReport& report, std::ostream& out);

}  // namespace noneq::cli
