#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mems/grid.hpp"

namespace mems {

/// Geometry too close to touchdown for the pulled-back operator.
class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The linear solve did not reach the residual contract.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

inline constexpr double kDefaultFloorClearance = 1e-4;
inline constexpr double kResidualTolerance = 1e-10;

/// Nodal field on the mapped grid, row-major in x: value(i, j) at (x_i, eta_j).
class NodalField {
 public:
  NodalField() = default;
  NodalField(std::size_t nx, std::size_t neta, double fill = 0.0)
      : nx_(nx), neta_(neta), data_(nx * neta, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * neta_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * neta_ + j]; }
  std::size_t nx() const { return nx_; }
  std::size_t neta() const { return neta_; }
  std::span<const double> values() const { return data_; }

 private:
  std::size_t nx_ = 0;
  std::size_t neta_ = 0;
  std::vector<double> data_;
};

/// Coefficients of  eps^2 phi_xx + A phi_xeta + B phi_etaeta + C phi_eta = f
/// on the fixed rectangle. Only interior entries are meaningful.
struct CoefficientFields {
  double eps2 = 0.0;
  NodalField a;
  NodalField b;
  NodalField c;
  std::vector<double> u_x;
  std::vector<double> u_xx;
};

CoefficientFields map_coefficients(const DeflectionState& state, double epsilon, const MappedGrid& grid,
                                   double floor_clearance = kDefaultFloorClearance);

/// Mapped potential phi(x, eta) = psi_u(x, -1 + eta (1 + u(x))) and its traces.
struct PotentialField {
  NodalField phi;
  std::vector<double> gamma_m;
  std::vector<double> g;
  /// Linear-solver statistics; zero when the closed form was used.
  int iterations = 0;
  double residual = 0.0;
};

/// Reusable solver for a sequence of nearby geometries. A stale LU
/// factorization serves as the defect-correction preconditioner until it
/// stops contracting, at which point the operator is refactored.
/// Not thread-safe; give each simulation its own instance.
class PotentialSolver {
 public:
  PotentialSolver(const MappedGrid& grid, double floor_clearance = kDefaultFloorClearance);
  ~PotentialSolver();
  PotentialSolver(PotentialSolver&&) noexcept;
  PotentialSolver& operator=(PotentialSolver&&) noexcept;

  /// forcing, when given, holds one value per mapped node (interior used).
  PotentialField solve(const DeflectionState& state, const ModelParams& params,
                       const NodalField* forcing = nullptr);

  const MappedGrid& grid() const { return grid_; }
  int factorizations() const { return factorizations_; }

 private:
  struct Impl;
  MappedGrid grid_;
  double floor_clearance_;
  int factorizations_ = 0;
  std::unique_ptr<Impl> impl_;
};

PotentialField solve_potential(const DeflectionState& state, const ModelParams& params, const MappedGrid& grid,
                               const NodalField* forcing = nullptr);

/// gamma_m(x_i) = phi_eta(x_i, 1) / (1 + u_i), second-order one-sided in eta.
std::vector<double> trace_gradient(const NodalField& phi, const DeflectionState& state, const MappedGrid& grid);

/// g_i = (1 + eps^2 u_x^2) gamma_m^2.
std::vector<double> electrostatic_force(const DeflectionState& state, std::span<const double> gamma_m,
                                        const ModelParams& params, const Grid1D& grid);

/// Centered first derivative, second-order one-sided at the two ends.
std::vector<double> first_derivative(std::span<const double> u, double h);

/// Debug dump with columns x,eta,phi.
void write_potential_csv(const std::string& path, const PotentialField& field, const MappedGrid& grid);

}  // namespace mems
