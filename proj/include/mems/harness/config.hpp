#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mems/grid.hpp"
#include "mems/trajectory.hpp"

namespace mems::harness {

/// Bad configuration value; key names the offending setting.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Initial plate shape selector, parsed from zero | arch:h | bell:a,w | eig:c | file:path.
struct InitialData {
  enum class Kind { Zero, Arch, Bell, Eigen, File };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  double width = 1.0;
  std::string path;

  static InitialData parse(const std::string& text);
  std::string describe() const;
  /// Samples the shape on the grid; throws ConfigError("u0", ...) when the
  /// result is not an admissible deflection.
  DeflectionState evaluate(const Grid1D& grid) const;
};

struct RunConfig {
  ModelParams model{14.0, 0.1, 4.0};
  InitialData u0;
  std::size_t nx = 201;
  std::size_t neta = 101;
  StepControls controls;
  std::string out = "out";
  std::size_t snapshot_stride = 10;
  unsigned workers = 1;

  MappedGrid grid() const { return MappedGrid(nx, neta); }
  void validate() const;
};

struct SweepConfig {
  RunConfig base;
  std::vector<double> lambdas;
};

/// Ordered key -> raw value settings. Keys use the long flag spelling
/// (dt-init, t-max, ...); underscores are accepted and normalized.
using Settings = std::map<std::string, std::string>;

std::string normalize_key(std::string key);

/// Reads a flat "key = value" file; '#' starts a comment.
Settings read_settings_file(const std::string& path);

/// Keys understood by apply_run_setting.
const std::vector<std::string>& run_keys();
/// Additional keys understood by make_sweep_config.
const std::vector<std::string>& sweep_keys();

void apply_run_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Builds a validated run configuration. Unknown keys are rejected.
RunConfig make_run_config(const Settings& settings);
SweepConfig make_sweep_config(const Settings& settings);

/// MEMS_SIM_THREADS, when set to a positive integer, overrides the worker count.
unsigned resolve_workers(unsigned requested);

double parse_number(const std::string& key, const std::string& value);

}  // namespace mems::harness
