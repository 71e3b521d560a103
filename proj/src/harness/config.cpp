#include "mems/harness/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mems::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  const double v = parse_number(key, value);
  if (v < 0.0 || v != std::floor(v) || v > 1e12) throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
  return static_cast<std::size_t>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string cell;
  std::istringstream is(value);
  while (std::getline(is, cell, ',')) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(parse_number(key, cell));
  }
  return out;
}

}  // namespace

double parse_number(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) throw ConfigError(key, "missing value");
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
    throw ConfigError(key, "malformed number '" + value + "'");
  }
  return d;
}

std::string normalize_key(std::string key) {
  key = trim(key);
  while (key.starts_with('-')) key.erase(0, 1);
  std::replace(key.begin(), key.end(), '_', '-');
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  return key;
}

Settings read_settings_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot read " + path);
  Settings s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    s[normalize_key(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return s;
}

const std::vector<std::string>& run_keys() {
  static const std::vector<std::string> keys = {
      "lambda", "epsilon", "q",       "u0",        "nx",   "neta",    "dt-init",         "dt-min",
      "dt-max", "cfl",     "t-max",   "touch-eps", "out",  "workers", "snapshot-stride", "max-steps",
  };
  return keys;
}

const std::vector<std::string>& sweep_keys() {
  static const std::vector<std::string> keys = {"lambdas", "lambda-min", "lambda-max", "lambda-count", "spacing"};
  return keys;
}

void apply_run_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "lambda") {
    cfg.model.lambda = parse_number(key, value);
  } else if (key == "epsilon") {
    cfg.model.epsilon = parse_number(key, value);
  } else if (key == "q") {
    cfg.model.q = parse_number(key, value);
  } else if (key == "u0") {
    cfg.u0 = InitialData::parse(value);
  } else if (key == "nx") {
    cfg.nx = parse_count(key, value);
  } else if (key == "neta") {
    cfg.neta = parse_count(key, value);
  } else if (key == "dt-init") {
    cfg.controls.dt_init = parse_number(key, value);
  } else if (key == "dt-min") {
    cfg.controls.dt_min = parse_number(key, value);
  } else if (key == "dt-max") {
    cfg.controls.dt_max = parse_number(key, value);
  } else if (key == "cfl") {
    cfg.controls.cfl_source = parse_number(key, value);
  } else if (key == "t-max") {
    cfg.controls.T_max = parse_number(key, value);
  } else if (key == "touch-eps") {
    cfg.controls.touch_eps = parse_number(key, value);
  } else if (key == "out") {
    if (value.empty()) throw ConfigError(key, "missing value");
    cfg.out = value;
  } else if (key == "workers") {
    const std::size_t w = parse_count(key, value);
    if (w == 0 || w > 1024) throw ConfigError(key, "expected 1..1024");
    cfg.workers = static_cast<unsigned>(w);
  } else if (key == "snapshot-stride") {
    cfg.snapshot_stride = parse_count(key, value);
  } else if (key == "max-steps") {
    cfg.controls.max_steps = parse_count(key, value);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

void RunConfig::validate() const {
  auto wrap = [](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const InvariantError& e) {
      throw ConfigError(key, e.what());
    }
  };
  if (!(model.lambda > 0.0)) throw ConfigError("lambda", "must be positive");
  if (!(model.epsilon >= 0.0)) throw ConfigError("epsilon", "must be non-negative");
  if (!(model.q > 2.0)) throw ConfigError("q", "must exceed 2");
  wrap("nx", [&] { Grid1D g(nx); });
  wrap("neta", [&] { MappedGrid g(nx, neta); });
  if (!(controls.dt_min > 0.0)) throw ConfigError("dt-min", "must be positive");
  if (!(controls.dt_init >= controls.dt_min)) throw ConfigError("dt-init", "must be at least dt-min");
  if (!(controls.dt_max >= controls.dt_init)) throw ConfigError("dt-max", "must be at least dt-init");
  if (!(controls.touch_eps > 0.0 && controls.touch_eps < 0.1)) throw ConfigError("touch-eps", "must lie in (0, 0.1)");
  if (!(controls.cfl_source > 0.0)) throw ConfigError("cfl", "must be positive");
  if (!(controls.T_max > 0.0)) throw ConfigError("t-max", "must be positive");
  if (controls.max_steps == 0) throw ConfigError("max-steps", "must be positive");
  u0.evaluate(Grid1D(nx));
}

RunConfig make_run_config(const Settings& settings) {
  RunConfig cfg;
  if (!settings.contains("lambda")) throw ConfigError("lambda", "required");
  for (const auto& [key, value] : settings) apply_run_setting(cfg, key, value);
  cfg.workers = resolve_workers(cfg.workers);
  cfg.validate();
  return cfg;
}

SweepConfig make_sweep_config(const Settings& settings) {
  SweepConfig sc;
  Settings run_part;
  std::vector<double> listed;
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  std::string spacing = "linear";
  bool has_range = false;
  for (const auto& [key, value] : settings) {
    if (key == "lambdas") {
      listed = parse_list(key, value);
    } else if (key == "lambda-min") {
      lo = parse_number(key, value);
      has_range = true;
    } else if (key == "lambda-max") {
      hi = parse_number(key, value);
      has_range = true;
    } else if (key == "lambda-count") {
      count = parse_count(key, value);
      has_range = true;
    } else if (key == "spacing") {
      if (value != "linear" && value != "geometric") throw ConfigError(key, "expected linear or geometric");
      spacing = value;
    } else if (key == "lambda") {
      listed.push_back(parse_number(key, value));
    } else {
      apply_run_setting(sc.base, key, value);
    }
  }
  if (has_range) {
    if (count == 0) throw ConfigError("lambda-count", "required with lambda-min/lambda-max");
    if (!(lo > 0.0)) throw ConfigError("lambda-min", "must be positive");
    if (!(hi >= lo)) throw ConfigError("lambda-max", "must be at least lambda-min");
    for (std::size_t k = 0; k < count; ++k) {
      const double s = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
      listed.push_back(spacing == "geometric" ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s);
    }
  }
  if (listed.empty()) throw ConfigError("lambdas", "empty lambda list");
  for (double l : listed) {
    if (!(l > 0.0)) throw ConfigError("lambdas", "lambda values must be positive");
  }
  std::sort(listed.begin(), listed.end());
  listed.erase(std::unique(listed.begin(), listed.end()), listed.end());
  sc.lambdas = listed;
  sc.base.model.lambda = listed.front();
  sc.base.workers = resolve_workers(sc.base.workers);
  sc.base.validate();
  return sc;
}

unsigned resolve_workers(unsigned requested) {
  const char* env = std::getenv("MEMS_SIM_THREADS");
  if (env == nullptr || *env == '\0') return requested;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v <= 0 || v > 1024) throw ConfigError("MEMS_SIM_THREADS", std::string("invalid value '") + env + "'");
  return static_cast<unsigned>(v);
}

}  // namespace mems::harness
