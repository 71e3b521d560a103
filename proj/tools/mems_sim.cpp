// Command-line front end: run, sweep, check, validate.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "mems/harness/commands.hpp"
#include "mems/harness/config.hpp"
#include "mems/harness/validation.hpp"

using namespace mems::harness;

namespace {

struct FlagSet {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_file;

  void attach(CLI::App* app, const std::vector<std::string>& keys) {
    for (const auto& key : keys) {
      options[key] = app->add_option("--" + key, values[key]);
    }
    app->add_option("--config", config_file, "flat key = value file; flags override it");
  }

  Settings merged() const {
    Settings s;
    if (!config_file.empty()) s = read_settings_file(config_file);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) s[key] = values.at(key);
    }
    return s;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-boundary MEMS simulator with finite-time singularity diagnostics"};
  app.require_subcommand(1);

  FlagSet run_flags, sweep_flags, check_flags;
  auto* run = app.add_subcommand("run", "simulate one configuration");
  run_flags.attach(run, run_keys());

  auto* sweep = app.add_subcommand("sweep", "simulate a list of lambda values in parallel");
  std::vector<std::string> sweep_all = run_keys();
  sweep_all.insert(sweep_all.end(), sweep_keys().begin(), sweep_keys().end());
  sweep_flags.attach(sweep, sweep_all);

  auto* check = app.add_subcommand("check", "re-verify energy inequalities on a stored trajectory");
  std::string trajectory_path, report_path;
  check->add_option("trajectory", trajectory_path, "trajectory.csv written by run")->required();
  check->add_option("--report", report_path, "JSON report path");
  check_flags.attach(check, run_keys());

  auto* validate = app.add_subcommand("validate", "run the solver validation battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(make_run_config(run_flags.merged()), std::cout);
    if (*sweep) return cmd_sweep(make_sweep_config(sweep_flags.merged()), std::cout);
    if (*check) return cmd_check(trajectory_path, make_run_config(check_flags.merged()), report_path, std::cout);
    if (*validate) return cmd_validate(std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
  return kExitOk;
}
