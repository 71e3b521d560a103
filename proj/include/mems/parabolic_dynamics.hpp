#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mems/elliptic_potential.hpp"
#include "mems/grid.hpp"
#include "mems/trajectory.hpp"

namespace mems {

/// Solves (I - dt Lap_h) x = rhs with x_0 = x_{n-1} = 0 (Thomas algorithm).
std::vector<double> solve_implicit_diffusion(std::span<const double> rhs, double dt, double h);

/// One first-order IMEX step with a given load g: implicit diffusion,
/// explicit force -lambda g.
DeflectionState imex_step(const DeflectionState& state, double dt, double lambda, std::span<const double> g,
                          const Grid1D& grid);

/// As above, evaluating g at the current state (closed form when epsilon = 0).
DeflectionState imex_step(const DeflectionState& state, double dt, const ModelParams& params,
                          const MappedGrid& grid);

/// Homogeneous heat flow by repeated implicit steps of size dt; the last
/// step is shortened to land on t.
std::vector<double> heat_evolve(std::span<const double> v0, double t, double dt, const Grid1D& grid);

/// Homogeneous heat flow through an explicit sequence of step sizes.
std::vector<double> heat_evolve(std::span<const double> v0, std::span<const double> steps, const Grid1D& grid);

/// lambda / (1 + u)^2, the load of the vanishing-aspect-ratio model.
std::vector<double> vanishing_aspect_rhs(const DeflectionState& state, double lambda);

/// (h sum |Lap_h u|^q)^(1/q) + max |u| over interior nodes.
double sobolev_proxy(std::span<const double> u, double q, double h);

struct SimulationOptions {
  /// Store every k-th accepted state (plus the first and last); 0 disables.
  std::size_t snapshot_stride = 0;
  double sobolev_threshold = 1e6;
  double envelope_tol = 1e-3;
  double barrier_tol = 1e-6;
};

struct SimulationResult {
  Trajectory trajectory;
  Outcome outcome;
  /// Last accepted state, or the overshooting state for a forced touchdown.
  DeflectionState final_state;
};

SimulationResult run_simulation(const ModelParams& params, const DeflectionState& u0, const StepControls& controls,
                                const MappedGrid& grid, const SimulationOptions& options = {});

}  // namespace mems
