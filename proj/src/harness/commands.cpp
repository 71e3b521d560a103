#include "mems/harness/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "mems/csv_io.hpp"

namespace mems::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kIdentityRelTol = 1e-3;
constexpr double kComparisonTol = 1e-6;

// NaN and infinities become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace

std::string model_name(const ModelParams& params) {
  return params.epsilon == 0.0 ? "vanishing-aspect" : "free-boundary";
}

json certificate_json(const SingularityCertificate& cert, const ProofParams& proof) {
  json j;
  j["applicable"] = cert.applicable;
  j["reason"] = cert.reason;
  j["lambda_star"] = number(proof.lambda_star);
  j["p"] = number(proof.p);
  j["delta"] = number(proof.delta);
  j["alpha"] = number(proof.alpha);
  j["chi"] = number(proof.chi);
  j["chi_eps"] = number(proof.chi_eps);
  if (cert.applicable) {
    j["y_root"] = number(cert.y_root);
    j["y_pdelta"] = number(cert.y_pdelta);
    j["F_at_y"] = number(cert.F_at_y);
    j["t_pdelta"] = number(cert.t_pdelta);
    j["anchor_time"] = cert.anchor_time >= 0.0 ? number(cert.anchor_time) : json(nullptr);
    j["barrier_crossing_time"] = number(cert.barrier_crossing_time);
  } else {
    j["y_pdelta"] = nullptr;
    j["t_pdelta"] = nullptr;
    j["barrier_crossing_time"] = nullptr;
  }
  j["violations"] = cert.barrier_violations;
  return j;
}

json summary_json(const RunConfig& cfg, const SimulationResult& result, const SingularityCertificate& cert) {
  const Trajectory& traj = result.trajectory;
  json j;
  j["model"] = model_name(cfg.model);
  j["lambda"] = cfg.model.lambda;
  j["epsilon"] = cfg.model.epsilon;
  j["q"] = cfg.model.q;
  j["u0"] = cfg.u0.describe();
  j["nx"] = cfg.nx;
  j["neta"] = cfg.neta;
  j["lambda_star"] = number(traj.proof.lambda_star);
  j["outcome"] = to_string(result.outcome.kind);
  j["T"] = number(result.outcome.T);
  j["detail"] = result.outcome.detail;
  j["steps"] = traj.records.empty() ? 0 : traj.records.size() - 1;
  j["min_u_final"] = number(result.final_state.min());
  j["sobolev_flag_time"] =
      result.outcome.sobolev_flag_time ? number(*result.outcome.sobolev_flag_time) : json(nullptr);
  j["certificate"] = certificate_json(cert, traj.proof);
  return j;
}

int cmd_run(const RunConfig& cfg, std::ostream& log) {
  const MappedGrid grid = cfg.grid();
  const DeflectionState u0 = cfg.u0.evaluate(grid.base());
  SimulationOptions opts;
  opts.snapshot_stride = cfg.snapshot_stride;
  const SimulationResult result = run_simulation(cfg.model, u0, cfg.controls, grid, opts);
  const SingularityCertificate cert =
      singularity_certificate(result.trajectory, result.trajectory.proof, lemma2_envelope(u0));

  try {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw IoError("cannot create " + cfg.out + ": " + ec.message());
    write_trajectory_csv((fs::path(cfg.out) / "trajectory.csv").string(), result.trajectory.records);
    if (cfg.snapshot_stride > 0) {
      write_snapshots((fs::path(cfg.out) / "snapshots").string(), result.trajectory.snapshots, grid.base());
    }
    write_json((fs::path(cfg.out) / "summary.json").string(), summary_json(cfg, result, cert));
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }

  log << model_name(cfg.model) << " lambda=" << format_number(cfg.model.lambda) << " epsilon="
      << format_number(cfg.model.epsilon) << ": " << to_string(result.outcome.kind) << " at T="
      << format_number(result.outcome.T) << " (" << result.outcome.detail << ")\n";
  return result.outcome.kind == OutcomeKind::NumericalFailure ? kExitNumericalFailure : kExitOk;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  std::vector<SweepRow> rows(cfg.lambdas.size());
  const MappedGrid grid = cfg.base.grid();
  const DeflectionState u0 = cfg.base.u0.evaluate(grid.base());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      SweepRow& row = rows[k];
      row.lambda = cfg.lambdas[k];
      ModelParams params = cfg.base.model;
      params.lambda = row.lambda;
      row.lambda_star = lambda_star(u0.max(), params.epsilon);
      row.certificate_applicable = row.lambda > row.lambda_star;
      try {
        const SimulationResult r = run_simulation(params, u0, cfg.base.controls, grid);
        row.outcome = r.outcome.kind;
        row.T = r.outcome.T;
        row.detail = r.outcome.detail;
      } catch (const std::exception& e) {
        row.outcome = OutcomeKind::NumericalFailure;
        row.detail = e.what();
      }
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(cfg.base.workers, static_cast<unsigned>(rows.size())));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.lambda < b.lambda; });
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "lambda,outcome,T_touchdown,lambda_star,certificate_applicable\n";
  for (const auto& r : rows) {
    os << format_number(r.lambda) << ',' << to_string(r.outcome) << ','
       << (r.outcome == OutcomeKind::Touchdown ? format_number(r.T) : std::string()) << ','
       << format_number(r.lambda_star) << ',' << (r.certificate_applicable ? "true" : "false") << '\n';
  }
}

int cmd_sweep(const SweepConfig& cfg, std::ostream& log) {
  const std::vector<SweepRow> rows = run_sweep(cfg);
  const fs::path path = fs::path(cfg.base.out) / "sweep.csv";
  std::error_code ec;
  fs::create_directories(cfg.base.out, ec);
  std::ofstream os(path);
  if (ec || !os) {
    log << "error: cannot write " << path.string() << '\n';
    return kExitIo;
  }
  write_sweep_csv(os, rows);
  if (!os) {
    log << "error: write failed: " << path.string() << '\n';
    return kExitIo;
  }
  for (const auto& r : rows) {
    log << "lambda=" << format_number(r.lambda) << ": " << to_string(r.outcome);
    if (r.outcome == OutcomeKind::Touchdown) log << " at T=" << format_number(r.T);
    log << '\n';
  }
  return kExitOk;
}

CheckResult check_trajectory(const std::string& trajectory_path, const RunConfig& cfg) {
  const MappedGrid grid = cfg.grid();
  const DeflectionState u0 = cfg.u0.evaluate(grid.base());
  const ProofParams proof = choose_parameters(u0.max(), cfg.model.epsilon, cfg.model.lambda);
  const Lemma2Envelope envelope = lemma2_envelope(u0);
  const double top0 = std::max(0.0, u0.max());

  Trajectory traj;
  traj.params = cfg.model;
  traj.proof = proof;
  traj.max_u0_positive = top0;
  traj.hx = grid.hx();
  traj.records = read_trajectory_csv(trajectory_path);
  if (traj.records.empty()) throw IoError(trajectory_path + ": no records");

  const fs::path snap_dir = fs::path(trajectory_path).parent_path() / "snapshots";
  traj.snapshots = read_snapshots(snap_dir.string(), grid.base());

  json report;
  bool ok = true;

  const auto diss = check_dissipation(traj, proof);
  json diss_j = json::array();
  for (const auto& v : diss) {
    diss_j.push_back({{"t1", v.t1}, {"t2", v.t2}, {"slope", number(v.slope)}, {"bound", number(v.bound)},
                      {"tolerance", v.tolerance}});
  }
  report["dissipation_violations"] = diss_j;
  ok = ok && diss.empty();

  const auto env_viol = check_envelope(traj, envelope);
  report["envelope"] = {{"C0", envelope.C0}, {"alpha_max", envelope.alpha_max}, {"violations", env_viol}};
  ok = ok && env_viol.empty() && proof.alpha <= envelope.alpha_max;

  std::vector<double> floor_viol;
  for (const auto& r : traj.records) {
    if (r.min_u > -1.0 && !(r.E_alpha > -1.0)) floor_viol.push_back(r.t);
  }
  report["energy_floor_violations"] = floor_viol;
  ok = ok && floor_viol.empty();

  // Heat part of the splitting u = v + w, advanced with the recorded steps.
  std::vector<double> v(u0.u.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, u0.u[i]);
  std::size_t rec = 0;

  PotentialSolver solver(grid);
  json snaps = json::array();
  for (const auto& s : traj.snapshots) {
    json sj;
    sj["t"] = s.t;
    sj["min_u"] = s.min();
    bool snap_ok = true;

    while (rec + 1 < traj.records.size() && traj.records[rec + 1].t <= s.t * (1.0 + 1e-14)) {
      ++rec;
      v = solve_implicit_diffusion(v, traj.records[rec].dt, grid.hx());
    }
    const bool aligned = std::abs(traj.records[rec].t - s.t) <= 1e-12 * std::max(1.0, s.t);
    if (aligned) {
      double w_max = -std::numeric_limits<double>::infinity();
      double v_min = std::numeric_limits<double>::infinity();
      double v_max = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < v.size(); ++i) {
        w_max = std::max(w_max, s.u[i] - v[i]);
        v_min = std::min(v_min, v[i]);
        v_max = std::max(v_max, v[i]);
      }
      const bool split_ok = w_max <= kComparisonTol && v_min >= -kComparisonTol && v_max <= top0 + kComparisonTol;
      sj["splitting"] = {{"w_max", w_max}, {"v_min", v_min}, {"v_max", v_max}, {"ok", split_ok}};
      snap_ok = snap_ok && split_ok;
    }
    const bool barrier_ok = s.max() <= top0 + kComparisonTol;
    sj["upper_barrier_ok"] = barrier_ok;
    snap_ok = snap_ok && barrier_ok;

    if (1.0 + s.min() <= kDefaultFloorClearance) {
      sj["skipped"] = "gap below floor clearance";
    } else {
      try {
        const PotentialField field = solver.solve(s, cfg.model);
        const IdentityReport p9 = check_identity_p9(s, field, proof.p, cfg.model.epsilon, grid);
        const InequalityReport p8 = check_lower_bound_p8(s, field, proof.p, grid);
        const InequalityReport p10 =
            check_jensen_bound_p10(s, field, proof.p, cfg.model.epsilon, proof.alpha, grid);
        const double p9_tol = kIdentityRelTol * std::max(1.0, std::abs(p9.lhs));
        sj["identity"] = {{"lhs", p9.lhs}, {"rhs", p9.rhs}, {"residual", p9.residual}, {"tolerance", p9_tol}};
        sj["lower_bound"] = {{"lhs", p8.lhs}, {"rhs", p8.rhs}, {"margin", p8.margin}, {"violated", p8.violated}};
        sj["jensen_bound"] = {{"lhs", p10.lhs}, {"rhs", p10.rhs}, {"margin", p10.margin}, {"violated", p10.violated}};
        snap_ok = snap_ok && p9.residual <= p9_tol && !p8.violated && !p10.violated;
      } catch (const std::exception& e) {
        sj["error"] = e.what();
        snap_ok = false;
      }
    }
    sj["ok"] = snap_ok;
    ok = ok && snap_ok;
    snaps.push_back(sj);
  }
  report["snapshots"] = snaps;

  const SingularityCertificate cert = singularity_certificate(traj, proof, envelope);
  report["certificate"] = certificate_json(cert, proof);
  ok = ok && cert.barrier_violations.empty();

  report["lambda"] = cfg.model.lambda;
  report["epsilon"] = cfg.model.epsilon;
  report["records"] = traj.records.size();
  report["ok"] = ok;
  return CheckResult{report, ok};
}

int cmd_check(const std::string& trajectory_path, const RunConfig& cfg, const std::string& report_path,
              std::ostream& log) {
  const fs::path snap_index = fs::path(trajectory_path).parent_path() / "snapshots" / "index.csv";
  if (!fs::exists(snap_index)) {
    log << "error: no snapshots found at " << snap_index.string() << " (run with --snapshot-stride > 0)\n";
    return kExitConfig;
  }
  CheckResult result;
  try {
    result = check_trajectory(trajectory_path, cfg);
    const std::string out =
        report_path.empty() ? (fs::path(trajectory_path).parent_path() / "check_report.json").string() : report_path;
    write_json(out, result.report);
    log << "report written to " << out << '\n';
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }
  const auto& diss = result.report["dissipation_violations"];
  log << "dissipation violations: " << diss.size() << '\n';
  for (const auto& v : diss) {
    log << "  [" << v["t1"].get<double>() << ", " << v["t2"].get<double>() << "]\n";
  }
  log << (result.ok ? "all checks passed" : "violations found") << '\n';
  return result.ok ? kExitOk : kExitViolations;
}

}  // namespace mems::harness
