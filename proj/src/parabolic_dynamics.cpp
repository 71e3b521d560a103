#include "mems/parabolic_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mems/theory_checks.hpp"

namespace mems {

std::vector<double> solve_implicit_diffusion(std::span<const double> rhs, double dt, double h) {
  const std::size_t n = rhs.size();
  std::vector<double> x(n, 0.0);
  if (n < 3) return x;
  const double r = dt / (h * h);
  const double diag = 1.0 + 2.0 * r;
  const double off = -r;

  // interior unknowns 1..n-2; Dirichlet zeros fold away
  const std::size_t m = n - 2;
  std::vector<double> c(m), d(m);
  c[0] = off / diag;
  d[0] = rhs[1] / diag;
  for (std::size_t k = 1; k < m; ++k) {
    const double denom = diag - off * c[k - 1];
    if (denom == 0.0 || !std::isfinite(denom)) throw std::runtime_error("tridiagonal solve broke down");
    c[k] = off / denom;
    d[k] = (rhs[k + 1] - off * d[k - 1]) / denom;
  }
  x[m] = d[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) x[k + 1] = d[k] - c[k] * x[k + 2];
  return x;
}

DeflectionState imex_step(const DeflectionState& state, double dt, double lambda, std::span<const double> g,
                          const Grid1D& grid) {
  std::vector<double> rhs(state.u.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = state.u[i] - dt * lambda * g[i];
  return DeflectionState{state.t + dt, solve_implicit_diffusion(rhs, dt, grid.spacing())};
}

DeflectionState imex_step(const DeflectionState& state, double dt, const ModelParams& params,
                          const MappedGrid& grid) {
  const PotentialField field = solve_potential(state, params, grid);
  return imex_step(state, dt, params.lambda, field.g, grid.base());
}

std::vector<double> heat_evolve(std::span<const double> v0, double t, double dt, const Grid1D& grid) {
  if (!(dt > 0.0)) throw std::invalid_argument("heat_evolve needs dt > 0");
  std::vector<double> v(v0.begin(), v0.end());
  double elapsed = 0.0;
  while (elapsed < t * (1.0 - 1e-14)) {
    const double step = std::min(dt, t - elapsed);
    v = solve_implicit_diffusion(v, step, grid.spacing());
    elapsed += step;
  }
  return v;
}

std::vector<double> heat_evolve(std::span<const double> v0, std::span<const double> steps, const Grid1D& grid) {
  std::vector<double> v(v0.begin(), v0.end());
  for (double step : steps) v = solve_implicit_diffusion(v, step, grid.spacing());
  return v;
}

std::vector<double> vanishing_aspect_rhs(const DeflectionState& state, double lambda) {
  std::vector<double> f(state.u.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double gap = 1.0 + state.u[i];
    f[i] = lambda / (gap * gap);
  }
  return f;
}

double sobolev_proxy(std::span<const double> u, double q, double h) {
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    const double lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
    sum += std::pow(std::abs(lap), q);
  }
  double sup = 0.0;
  for (double v : u) sup = std::max(sup, std::abs(v));
  return std::pow(h * sum, 1.0 / q) + sup;
}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

SimulationResult run_simulation(const ModelParams& params, const DeflectionState& u0, const StepControls& controls,
                                const MappedGrid& grid, const SimulationOptions& options) {
  params.validate();
  controls.validate();
  check_admissible(u0, grid.base());

  const double h = grid.hx();
  const double top0 = std::max(0.0, u0.max());
  const Eigenpair eig = make_eigenpair(grid.base());
  const Lemma2Envelope envelope = lemma2_envelope(u0.max());

  SimulationResult result;
  Trajectory& traj = result.trajectory;
  traj.params = params;
  traj.proof = choose_parameters(u0.max(), params.epsilon, params.lambda);
  traj.max_u0_positive = top0;
  traj.hx = h;
  const ProofParams& proof = traj.proof;

  auto make_record = [&](const DeflectionState& s, double dt) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.dt = dt;
    r.min_u = s.min();
    r.max_u = s.max();
    r.E_alpha = energy(s.u, proof.alpha, eig, h);
    r.F_of_E = r.E_alpha > -1.0 ? F_pdelta(r.E_alpha, proof.p, proof.delta, proof.lambda, proof.epsilon)
                                : std::numeric_limits<double>::quiet_NaN();
    r.envelope = envelope(s.t);
    r.sobolev_proxy = sobolev_proxy(s.u, params.q, h);
    r.energy_floor_violated = r.min_u > -1.0 && !(r.E_alpha > -1.0);
    r.envelope_violated = r.E_alpha > r.envelope + options.envelope_tol;
    r.upper_barrier_violated = r.max_u > top0 + options.barrier_tol;
    if (!traj.records.empty()) {
      const auto& prev = traj.records.back();
      r.dE_dt = (r.E_alpha - prev.E_alpha) / (r.t - prev.t);
    }
    if (r.sobolev_proxy > options.sobolev_threshold && !result.outcome.sobolev_flag_time) {
      result.outcome.sobolev_flag_time = r.t;
    }
    traj.records.push_back(r);
  };

  DeflectionState state = u0;
  state.t = 0.0;
  make_record(state, 0.0);
  if (options.snapshot_stride > 0) traj.snapshots.push_back(state);

  auto finish = [&](OutcomeKind kind, double T, std::string detail) {
    result.outcome.kind = kind;
    result.outcome.T = T;
    result.outcome.detail = std::move(detail);
    if (options.snapshot_stride > 0 && (traj.snapshots.empty() || traj.snapshots.back().t != state.t)) {
      traj.snapshots.push_back(state);
    }
    if (result.final_state.u.empty()) result.final_state = state;
    return result;
  };

  if (1.0 + state.min() <= controls.touch_eps) {
    return finish(OutcomeKind::Touchdown, 0.0, "initial gap already within touch_eps");
  }

  PotentialSolver solver(grid);
  double dt = controls.dt_init;
  std::size_t steps = 0;

  while (true) {
    if (state.t >= controls.T_max) {
      return finish(OutcomeKind::Survived, controls.T_max, "reached T_max");
    }
    if (steps >= controls.max_steps) {
      return finish(OutcomeKind::NumericalFailure, state.t, "step budget exhausted");
    }

    PotentialField field;
    try {
      field = solver.solve(state, params);
    } catch (const SolverFailure& e) {
      return finish(OutcomeKind::NumericalFailure, state.t,
                    std::string(e.what()) + " (iterations " + std::to_string(e.iterations()) + ")");
    } catch (const DegenerateGeometryError& e) {
      return finish(OutcomeKind::NumericalFailure, state.t, e.what());
    }
    if (!all_finite(field.g)) {
      return finish(OutcomeKind::NumericalFailure, state.t, "non-finite electrostatic force");
    }

    const double gap0 = 1.0 + state.min();
    DeflectionState trial;
    double step = 0.0;
    double change = 0.0;
    bool clipped = false;
    while (true) {
      clipped = dt >= controls.T_max - state.t;
      step = clipped ? controls.T_max - state.t : dt;
      try {
        trial = imex_step(state, step, params.lambda, field.g, grid.base());
        if (clipped) trial.t = controls.T_max;
      } catch (const std::runtime_error& e) {
        return finish(OutcomeKind::NumericalFailure, state.t, e.what());
      }
      if (!all_finite(trial.u)) {
        return finish(OutcomeKind::NumericalFailure, state.t, "non-finite deflection");
      }
      change = std::abs((1.0 + trial.min()) - gap0) / gap0;
      if (change <= controls.cfl_source || step <= controls.dt_min) break;
      dt = std::max(controls.dt_min, step * std::max(0.5, controls.cfl_source / change));
    }
    ++steps;

    const double gap1 = 1.0 + trial.min();
    if (!(gap1 > 0.0)) {
      result.final_state = trial;
      return finish(OutcomeKind::Touchdown, trial.t, "time step underflow with the gap closing");
    }

    state = std::move(trial);
    make_record(state, step);
    if (options.snapshot_stride > 0 && steps % options.snapshot_stride == 0) traj.snapshots.push_back(state);

    if (gap1 <= controls.touch_eps) {
      return finish(OutcomeKind::Touchdown, state.t, "min(1 + u) reached touch_eps");
    }

    const double factor = change > 0.0 ? std::clamp(controls.cfl_source / change, 0.5, 1.5) : 1.5;
    const double base = clipped ? dt : step;
    dt = std::clamp(base * factor, controls.dt_min, controls.dt_max);
  }
}

}  // namespace mems
