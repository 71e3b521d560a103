#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mems/elliptic_potential.hpp"

namespace mems::harness {

struct ValidationCheck {
  std::string name;
  double value = 0.0;
  std::string criterion;
  bool passed = false;
};

/// Curved test plate u(x) = -amplitude cos(pi x / 2).
DeflectionState cosine_plate(const Grid1D& grid, double amplitude);

/// Forcing that makes phi = eta + a sin(pi x) sin(pi eta) solve the mapped
/// equation on the cosine plate (exact coefficients, not the discrete ones).
NodalField manufactured_forcing(const MappedGrid& grid, double epsilon, double plate_amplitude, double a = 0.1);

/// Max-norm error of the discrete solution against the manufactured field.
double manufactured_error(const MappedGrid& grid, double epsilon, double plate_amplitude, double a = 0.1);

/// ||g(u) - (1+u)^-2||_inf on the cosine plate.
double epsilon_deviation(const MappedGrid& grid, double epsilon, double plate_amplitude);

std::vector<ValidationCheck> run_validation();

/// Prints a pass/fail table; exit status 0 iff every check passed.
int cmd_validate(std::ostream& os);

}  // namespace mems::harness
