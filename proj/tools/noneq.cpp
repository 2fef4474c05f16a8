// noneq: steady and transient entanglement of two emitters near a slab out of thermal
// equilibrium.
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "noneq/cli/commands.hpp"
#include "noneq/cli/validate.hpp"
#include "noneq/error.hpp"

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kConfigError = 2, kNumericalError = 3 };

struct Common {
  std::string config;
  std::string out;
  std::string format;
  int jobs = 1;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "YAML or JSON run configuration");
  if (config_required) opt->required();
  sub->add_option("--out", c.out, "output file (default: config output.path, else stdout)");
  sub->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs", c.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
}

noneq::cli::RunConfig load(const Common& c) {
  auto cfg = c.config.empty() ? noneq::cli::default_config() : noneq::cli::load_config(c.config);
  noneq::cli::apply_environment(cfg);
  noneq::cli::validate(cfg);
  return cfg;
}

// Opens the destination; standard output when no path is given.
std::ostream& open_out(const std::string& path, std::unique_ptr<std::ofstream>& file) {
  if (path.empty() || path == "-") return std::cout;
  file = std::make_unique<std::ofstream>(path);
  if (!*file) throw noneq::ConfigError("--out", "cannot write '" + path + "'");
  return *file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-emitter entanglement near a slab out of thermal equilibrium"};
  app.require_subcommand(1);

  Common c;
  auto* rates = app.add_subcommand("rates", "transition rates and coupling shift");
  add_common(rates, c, true);

  std::string initial;
  double t_max = 0;
  int n_points = 0;
  auto* dyn = app.add_subcommand("dynamics", "time evolution from a named initial state");
  add_common(dyn, c, true);
  dyn->add_option("--initial", initial, "G, E, A, S, 2 or 3");
  dyn->add_option("--t-max", t_max, "final time in units of 1/Gamma0");
  dyn->add_option("--n-points", n_points, "number of output times");

  auto* steady = app.add_subcommand("steady", "stationary state and concurrence");
  add_common(steady, c, true);

  auto* sweep = app.add_subcommand("sweep", "grid, white-line, dipole-angle or channel sweep");
  add_common(sweep, c, true);
  std::string summary_path;
  sweep->add_option("--summary", summary_path, "JSON summary file (default: <out>.summary.json)");

  std::string level = "quick";
  auto* val = app.add_subcommand("validate", "oracle and reproduction checks");
  add_common(val, c, false);
  val->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = load(c);
    if (*dyn) {
      if (!initial.empty()) {
        cfg.dynamics.initial = initial;
        cfg.dynamics.rho0.reset();
      }
      if (t_max > 0) cfg.dynamics.t_max = t_max;
      if (n_points > 0) cfg.dynamics.n_points = n_points;
      noneq::cli::validate(cfg);
    }
    const std::string out_path = c.out.empty() ? cfg.output.path : c.out;
    std::unique_ptr<std::ofstream> file;

    if (*val) {
      const auto rep = noneq::cli::run_validation(level, cfg.system.quadrature, c.jobs);
      noneq::cli::print_report(rep, open_out(out_path, file));
      return rep.all_passed() ? kOk : kValidationFailed;
    }
    std::ostream& out = open_out(out_path, file);
    if (*rates) {
      noneq::cli::cmd_rates(cfg, c.format, out);
    } else if (*dyn) {
      noneq::cli::cmd_dynamics(cfg, c.format, out);
    } else if (*steady) {
      noneq::cli::cmd_steady(cfg, c.format, out);
    } else if (*sweep) {
      if (summary_path.empty() && file) summary_path = out_path + ".summary.json";
      std::unique_ptr<std::ofstream> sfile;
      std::ostream* summary = nullptr;
      if (!summary_path.empty()) summary = &open_out(summary_path, sfile);
      noneq::cli::cmd_sweep(cfg, c.jobs, c.format, out, summary);
    }
  } catch (const noneq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const noneq::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const noneq::QuadratureError& e) {
    std::cerr << "quadrature error: " << e.what() << " (worst entry " << e.worst_entry() << ")\n";
    return kNumericalError;
  } catch (const noneq::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kOk;
}
