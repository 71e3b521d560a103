#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mems/harness/config.hpp"
#include "mems/parabolic_dynamics.hpp"
#include "mems/theory_checks.hpp"

namespace mems::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumericalFailure = 3,
  kExitIo = 4,
  kExitViolations = 5,
};

/// "vanishing-aspect" for epsilon == 0, "free-boundary" otherwise.
std::string model_name(const ModelParams& params);

nlohmann::json certificate_json(const SingularityCertificate& cert, const ProofParams& proof);
nlohmann::json summary_json(const RunConfig& cfg, const SimulationResult& result, const SingularityCertificate& cert);

/// Writes trajectory.csv, summary.json and snapshots/ under cfg.out.
int cmd_run(const RunConfig& cfg, std::ostream& log);

struct SweepRow {
  double lambda = 0.0;
  OutcomeKind outcome = OutcomeKind::NumericalFailure;
  double T = 0.0;
  double lambda_star = 0.0;
  bool certificate_applicable = false;
  std::string detail;
};

/// Runs every lambda on its own worker; rows come back sorted by lambda.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Writes sweep.csv under cfg.base.out.
int cmd_sweep(const SweepConfig& cfg, std::ostream& log);

struct CheckResult {
  nlohmann::json report;
  bool ok = false;
};

/// Re-evaluates the energy envelope, dissipation inequality, the potential
/// identities on stored snapshots, and the comparison-principle bounds.
/// Throws IoError for unreadable inputs.
CheckResult check_trajectory(const std::string& trajectory_path, const RunConfig& cfg);

/// report_path empty selects check_report.json next to the trajectory.
int cmd_check(const std::string& trajectory_path, const RunConfig& cfg, const std::string& report_path,
              std::ostream& log);

}  // namespace mems::harness
