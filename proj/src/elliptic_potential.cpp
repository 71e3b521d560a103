#include "mems/elliptic_potential.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>

namespace mems {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Defect correction aims well below the contract so that a stale
// factorization still yields solutions close to a fresh direct solve.
constexpr double kRefineTarget = 1e-13;
constexpr int kMaxStaleSweeps = 8;
constexpr int kMaxFreshSweeps = 4;
constexpr double kMinContraction = 0.25;

double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

std::vector<double> first_derivative(std::span<const double> u, double h) {
  const std::size_t n = u.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
  d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
  return d;
}

CoefficientFields map_coefficients(const DeflectionState& state, double epsilon, const MappedGrid& grid,
                                   double floor_clearance) {
  check_admissible(state, grid.base());
  const double clearance = 1.0 + state.min();
  if (clearance <= floor_clearance) {
    throw DegenerateGeometryError("gap 1 + min u = " + std::to_string(clearance) + " is below the floor clearance");
  }

  const std::size_t nx = grid.nx();
  const std::size_t ne = grid.neta();
  const double h = grid.hx();
  const auto& u = state.u;

  CoefficientFields cf;
  cf.eps2 = epsilon * epsilon;
  cf.u_x = first_derivative(u, h);
  cf.u_xx.assign(nx, 0.0);
  for (std::size_t i = 1; i + 1 < nx; ++i) cf.u_xx[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
  cf.u_xx[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
  cf.u_xx[nx - 1] = (2.0 * u[nx - 1] - 5.0 * u[nx - 2] + 4.0 * u[nx - 3] - u[nx - 4]) / (h * h);

  cf.a = NodalField(nx, ne);
  cf.b = NodalField(nx, ne);
  cf.c = NodalField(nx, ne);
  for (std::size_t i = 0; i < nx; ++i) {
    const double gap = 1.0 + u[i];
    const double ux = cf.u_x[i];
    const double uxx = cf.u_xx[i];
    for (std::size_t j = 0; j < ne; ++j) {
      const double eta = grid.eta(j);
      cf.a(i, j) = -2.0 * cf.eps2 * eta * ux / gap;
      cf.b(i, j) = cf.eps2 * eta * eta * ux * ux / (gap * gap) + 1.0 / (gap * gap);
      cf.c(i, j) = cf.eps2 * (-eta * uxx / gap + 2.0 * eta * ux * ux / (gap * gap));
    }
  }
  return cf;
}

struct PotentialSolver::Impl {
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  bool factored = false;
  Vec last_solution;
};

PotentialSolver::PotentialSolver(const MappedGrid& grid, double floor_clearance)
    : grid_(grid), floor_clearance_(floor_clearance), impl_(std::make_unique<Impl>()) {}

PotentialSolver::~PotentialSolver() = default;
PotentialSolver::PotentialSolver(PotentialSolver&&) noexcept = default;
PotentialSolver& PotentialSolver::operator=(PotentialSolver&&) noexcept = default;

PotentialField PotentialSolver::solve(const DeflectionState& state, const ModelParams& params,
                                      const NodalField* forcing) {
  const std::size_t nx = grid_.nx();
  const std::size_t ne = grid_.neta();
  PotentialField out;

  if (params.epsilon == 0.0 && forcing == nullptr) {
    check_admissible(state, grid_.base());
    if (1.0 + state.min() <= floor_clearance_) {
      throw DegenerateGeometryError("gap below the floor clearance");
    }
    out.phi = NodalField(nx, ne);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ne; ++j) out.phi(i, j) = grid_.eta(j);
    out.gamma_m.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) out.gamma_m[i] = 1.0 / (1.0 + state.u[i]);
    out.g = electrostatic_force(state, out.gamma_m, params, grid_.base());
    return out;
  }

  const CoefficientFields cf = map_coefficients(state, params.epsilon, grid_, floor_clearance_);
  const std::size_t m = ne - 2;
  const auto n_unknowns = static_cast<Eigen::Index>((nx - 2) * m);
  const double hx = grid_.hx();
  const double he = grid_.heta();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n_unknowns) * 9);
  Vec rhs = Vec::Zero(n_unknowns);
  auto index = [m](std::size_t i, std::size_t j) { return static_cast<int>((i - 1) * m + (j - 1)); };
  auto is_interior = [nx, ne](std::size_t i, std::size_t j) { return i > 0 && i + 1 < nx && j > 0 && j + 1 < ne; };

  for (std::size_t i = 1; i + 1 < nx; ++i) {
    for (std::size_t j = 1; j + 1 < ne; ++j) {
      const double cxx = cf.eps2 / (hx * hx);
      const double cxe = cf.a(i, j) / (4.0 * hx * he);
      const double cee = cf.b(i, j) / (he * he);
      const double ce = cf.c(i, j) / (2.0 * he);
      const double center = -2.0 * cxx - 2.0 * cee;
      const double scale = 1.0 / std::abs(center);
      const int row = index(i, j);
      double r = forcing ? (*forcing)(i, j) : 0.0;

      const struct {
        std::size_t i, j;
        double w;
      } stencil[] = {
          {i, j, center},         {i + 1, j, cxx},         {i - 1, j, cxx},         {i, j + 1, cee + ce},
          {i, j - 1, cee - ce},   {i + 1, j + 1, cxe},     {i - 1, j - 1, cxe},     {i + 1, j - 1, -cxe},
          {i - 1, j + 1, -cxe},
      };
      for (const auto& s : stencil) {
        if (s.w == 0.0) continue;
        if (is_interior(s.i, s.j)) {
          triplets.emplace_back(row, index(s.i, s.j), s.w * scale);
        } else {
          r -= s.w * grid_.eta(s.j);
        }
      }
      rhs[row] = r * scale;
    }
  }

  SpMat a(n_unknowns, n_unknowns);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();

  Impl& impl = *impl_;
  Vec x;
  double res = 0.0;
  int iterations = 0;
  bool converged = false;

  if (impl.factored && impl.last_solution.size() == n_unknowns) {
    x = impl.last_solution;
    Vec r = rhs - a * x;
    res = max_abs(r);
    converged = res <= kRefineTarget;
    for (int k = 0; k < kMaxStaleSweeps && !converged; ++k) {
      x += impl.lu.solve(r);
      ++iterations;
      r = rhs - a * x;
      const double next = max_abs(r);
      if (!std::isfinite(next) || next > kMinContraction * res) {
        res = next;
        break;
      }
      res = next;
      converged = res <= kRefineTarget;
    }
  }

  if (!converged) {
    if (!impl.analyzed) {
      impl.lu.analyzePattern(a);
      impl.analyzed = true;
    }
    impl.lu.factorize(a);
    ++factorizations_;
    if (impl.lu.info() != Eigen::Success) {
      impl.factored = false;
      throw SolverFailure("sparse LU factorization failed: " + impl.lu.lastErrorMessage(), iterations, res);
    }
    impl.factored = true;
    x = impl.lu.solve(rhs);
    ++iterations;
    Vec r = rhs - a * x;
    res = max_abs(r);
    for (int k = 0; k < kMaxFreshSweeps && res > kRefineTarget; ++k) {
      x += impl.lu.solve(r);
      ++iterations;
      r = rhs - a * x;
      res = max_abs(r);
    }
    if (!std::isfinite(res) || res > kResidualTolerance) {
      throw SolverFailure("potential solve residual " + std::to_string(res) + " exceeds tolerance", iterations,
                          res);
    }
  }
  impl.last_solution = x;

  out.phi = NodalField(nx, ne);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ne; ++j) {
      out.phi(i, j) = is_interior(i, j) ? x[index(i, j)] : grid_.eta(j);
    }
  }
  out.iterations = iterations;
  out.residual = res;
  out.gamma_m = trace_gradient(out.phi, state, grid_);
  out.g = electrostatic_force(state, out.gamma_m, params, grid_.base());
  return out;
}

PotentialField solve_potential(const DeflectionState& state, const ModelParams& params, const MappedGrid& grid,
                               const NodalField* forcing) {
  PotentialSolver solver(grid);
  return solver.solve(state, params, forcing);
}

std::vector<double> trace_gradient(const NodalField& phi, const DeflectionState& state, const MappedGrid& grid) {
  const std::size_t nx = grid.nx();
  const std::size_t top = grid.neta() - 1;
  const double he = grid.heta();
  std::vector<double> gamma(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double phi_eta = (3.0 * phi(i, top) - 4.0 * phi(i, top - 1) + phi(i, top - 2)) / (2.0 * he);
    gamma[i] = phi_eta / (1.0 + state.u[i]);
  }
  return gamma;
}

std::vector<double> electrostatic_force(const DeflectionState& state, std::span<const double> gamma_m,
                                        const ModelParams& params, const Grid1D& grid) {
  const std::vector<double> ux = first_derivative(state.u, grid.spacing());
  const double eps2 = params.epsilon * params.epsilon;
  std::vector<double> g(gamma_m.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (1.0 + eps2 * ux[i] * ux[i]) * gamma_m[i] * gamma_m[i];
  return g;
}

void write_potential_csv(const std::string& path, const PotentialField& field, const MappedGrid& grid) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "x,eta,phi\n" << std::setprecision(17);
  for (std::size_t i = 0; i < grid.nx(); ++i)
    for (std::size_t j = 0; j < grid.neta(); ++j) os << grid.x(i) << ',' << grid.eta(j) << ',' << field.phi(i, j) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace mems
