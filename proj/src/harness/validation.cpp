#include "mems/harness/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "mems/csv_io.hpp"
#include "mems/parabolic_dynamics.hpp"
#include "mems/theory_checks.hpp"

namespace mems::harness {

namespace {

constexpr double pi = std::numbers::pi;

ValidationCheck at_most(std::string name, double value, double limit) {
  return {std::move(name), value, "<= " + format_number(limit), value <= limit};
}

ValidationCheck within(std::string name, double value, double lo, double hi) {
  return {std::move(name), value, "in [" + format_number(lo) + ", " + format_number(hi) + "]", value >= lo && value <= hi};
}

}  // namespace

DeflectionState cosine_plate(const Grid1D& grid, double amplitude) {
  DeflectionState s;
  s.u.assign(grid.size(), 0.0);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) s.u[i] = -amplitude * std::cos(pi * grid.x(i) / 2.0);
  return s;
}

NodalField manufactured_forcing(const MappedGrid& grid, double epsilon, double plate_amplitude, double a) {
  const double eps2 = epsilon * epsilon;
  NodalField f(grid.nx(), grid.neta());
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    const double x = grid.x(i);
    const double u = -plate_amplitude * std::cos(pi * x / 2.0);
    const double ux = plate_amplitude * pi / 2.0 * std::sin(pi * x / 2.0);
    const double uxx = plate_amplitude * pi * pi / 4.0 * std::cos(pi * x / 2.0);
    const double gap = 1.0 + u;
    for (std::size_t j = 0; j < grid.neta(); ++j) {
      const double eta = grid.eta(j);
      const double sx = std::sin(pi * x), cx = std::cos(pi * x);
      const double se = std::sin(pi * eta), ce = std::cos(pi * eta);
      const double phi_xx = -a * pi * pi * sx * se;
      const double phi_ee = -a * pi * pi * sx * se;
      const double phi_xe = a * pi * pi * cx * ce;
      const double phi_e = 1.0 + a * pi * sx * ce;
      const double A = -2.0 * eps2 * eta * ux / gap;
      const double B = eps2 * eta * eta * ux * ux / (gap * gap) + 1.0 / (gap * gap);
      const double C = eps2 * (-eta * uxx / gap + 2.0 * eta * ux * ux / (gap * gap));
      f(i, j) = eps2 * phi_xx + A * phi_xe + B * phi_ee + C * phi_e;
    }
  }
  return f;
}

double manufactured_error(const MappedGrid& grid, double epsilon, double plate_amplitude, double a) {
  const DeflectionState plate = cosine_plate(grid.base(), plate_amplitude);
  const NodalField forcing = manufactured_forcing(grid, epsilon, plate_amplitude, a);
  const PotentialField field = solve_potential(plate, ModelParams{1.0, epsilon, 4.0}, grid, &forcing);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    for (std::size_t j = 0; j < grid.neta(); ++j) {
      const double exact = grid.eta(j) + a * std::sin(pi * grid.x(i)) * std::sin(pi * grid.eta(j));
      err = std::max(err, std::abs(field.phi(i, j) - exact));
    }
  }
  return err;
}

double epsilon_deviation(const MappedGrid& grid, double epsilon, double plate_amplitude) {
  const DeflectionState plate = cosine_plate(grid.base(), plate_amplitude);
  const PotentialField field = solve_potential(plate, ModelParams{1.0, epsilon, 4.0}, grid);
  double dev = 0.0;
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    const double gap = 1.0 + plate.u[i];
    dev = std::max(dev, std::abs(field.g[i] - 1.0 / (gap * gap)));
  }
  return dev;
}

std::vector<ValidationCheck> run_validation() {
  std::vector<ValidationCheck> checks;
  const MappedGrid grid(201, 101);

  {
    const DeflectionState flat = cosine_plate(grid.base(), 0.0);
    double phi_err = 0.0, gamma_err = 0.0, g_err = 0.0;
    for (double eps : {0.01, 0.1, 1.0}) {
      const PotentialField f = solve_potential(flat, ModelParams{1.0, eps, 4.0}, grid);
      for (std::size_t i = 0; i < grid.nx(); ++i) {
        for (std::size_t j = 0; j < grid.neta(); ++j) phi_err = std::max(phi_err, std::abs(f.phi(i, j) - grid.eta(j)));
        gamma_err = std::max(gamma_err, std::abs(f.gamma_m[i] - 1.0));
        g_err = std::max(g_err, std::abs(f.g[i] - 1.0));
      }
    }
    checks.push_back(at_most("flat plate max|phi - eta|", phi_err, 1e-9));
    checks.push_back(at_most("flat plate max|gamma_m - 1|", gamma_err, 1e-8));
    checks.push_back(at_most("flat plate max|g - 1|", g_err, 1e-8));
  }

  {
    const double coarse = manufactured_error(MappedGrid(65, 33), 0.1, 0.3);
    const double fine = manufactured_error(MappedGrid(129, 65), 0.1, 0.3);
    checks.push_back(within("manufactured solution error ratio", coarse / fine, 3.5, 4.5));
  }

  {
    const double d1 = epsilon_deviation(grid, 0.1, 0.3);
    const double d2 = epsilon_deviation(grid, 0.05, 0.3);
    checks.push_back(within("epsilon-consistency ratio (0.1 vs 0.05)", d1 / d2, 3.0, 5.0));
  }

  {
    const Eigenpair eig = make_eigenpair(grid.base());
    const double t = 0.2;
    const std::vector<double> v = heat_evolve(eig.zeta1, t, 1e-4, grid.base());
    double dev = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dev = std::max(dev, std::abs(v[i] - std::exp(-kMu1 * t) * eig.zeta1[i]));
    checks.push_back(at_most("heat decay of zeta1 to t = 0.2", dev, 1e-4));
  }

  {
    const Eigenpair eig = make_eigenpair(grid.base());
    std::vector<double> sq(eig.zeta1.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = eig.zeta1[i] * eig.zeta1[i];
    checks.push_back(at_most("|int zeta1 - 1|", std::abs(trapezoid(eig.zeta1, grid.hx()) - 1.0), 1e-4));
    checks.push_back(at_most("|int zeta1^2 - pi^2/16|", std::abs(trapezoid(sq, grid.hx()) - pi * pi / 16.0), 1e-4));
  }

  {
    const DeflectionState flat = cosine_plate(grid.base(), 0.0);
    double worst = 0.0;
    for (double eps : {0.1, 1.0}) {
      const PotentialField f = solve_potential(flat, ModelParams{1.0, eps, 4.0}, grid);
      const ProofParams pp = choose_parameters(0.0, eps, 14.0);
      worst = std::max(worst, check_identity_p9(flat, f, pp.p, eps, grid).residual);
    }
    checks.push_back(at_most("flat plate identity residual", worst, 1e-8));
  }

  {
    const double direct = lambda_star(0.0, 0.1);
    const double bisected = lambda_star_by_bisection(0.0, 0.1, 1e-6);
    checks.push_back(at_most("|lambda_star(0, 0.1) - 13.428|", std::abs(direct - 13.428), 1e-3));
    checks.push_back(at_most("|lambda_star direct - bisected|", std::abs(direct - bisected), 1e-5));
  }
  return checks;
}

int cmd_validate(std::ostream& os) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<ValidationCheck> checks = run_validation();
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool all = true;
  char line[256];
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-4s  %-42s  %-14.6g  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                  c.criterion.c_str());
    os << line;
    all = all && c.passed;
  }
  std::snprintf(line, sizeof line, "%zu checks, %.1f s\n", checks.size(), elapsed);
  os << line;
  return all ? 0 : 1;
}

}  // namespace mems::harness
