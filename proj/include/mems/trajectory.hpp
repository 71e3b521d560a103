#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mems/grid.hpp"

namespace mems {

/// Constants of the blow-up argument for one (u0, epsilon, lambda).
struct ProofParams {
  double p = 1.0;
  double delta = 1.0;
  double alpha = 0.0;
  double chi = 1.0;
  double chi_eps = 0.0;
  double lambda_star = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
};

/// Per-step observables. dE_dt is a backward difference and is NaN on the
/// first record.
struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double E_alpha = 0.0;
  double dE_dt = std::numeric_limits<double>::quiet_NaN();
  double F_of_E = 0.0;
  double envelope = 0.0;
  double sobolev_proxy = 0.0;
  bool energy_floor_violated = false;
  bool envelope_violated = false;
  bool upper_barrier_violated = false;
};

struct StepControls {
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 1e-3;
  double touch_eps = 5e-3;
  double cfl_source = 0.1;
  double T_max = 10.0;
  std::size_t max_steps = 200000;

  void validate() const;
};

enum class OutcomeKind { Touchdown, Survived, NumericalFailure };

std::string to_string(OutcomeKind kind);
OutcomeKind outcome_from_string(const std::string& s);

struct Outcome {
  OutcomeKind kind = OutcomeKind::Survived;
  double T = 0.0;
  std::string detail;
  /// First time the Sobolev proxy crossed its threshold, if ever.
  std::optional<double> sobolev_flag_time;
};

struct Trajectory {
  ModelParams params;
  ProofParams proof;
  double max_u0_positive = 0.0;
  double hx = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<DeflectionState> snapshots;
};

}  // namespace mems
