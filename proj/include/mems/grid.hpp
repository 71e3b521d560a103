#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mems {

/// Thrown when a configuration or state breaks a documented invariant.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform grid on the plate domain [-1, 1].
class Grid1D {
 public:
  explicit Grid1D(std::size_t n_x);

  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  double x(std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const { return nodes_; }

 private:
  std::size_t n_;
  double h_;
  std::vector<double> nodes_;
};

/// Tensor grid on the pulled-back gap [-1, 1] x [0, 1]; eta is the
/// normalized height (1 + z) / (1 + u(x)).
class MappedGrid {
 public:
  MappedGrid(std::size_t n_x, std::size_t n_eta);

  const Grid1D& base() const { return base_; }
  std::size_t nx() const { return base_.size(); }
  std::size_t neta() const { return n_eta_; }
  double hx() const { return base_.spacing(); }
  double heta() const { return d_eta_; }
  double x(std::size_t i) const { return base_.x(i); }
  double eta(std::size_t j) const { return j == n_eta_ - 1 ? 1.0 : j * d_eta_; }

 private:
  Grid1D base_;
  std::size_t n_eta_;
  double d_eta_;
};

/// Plate profile at one time instant.
struct DeflectionState {
  double t = 0.0;
  std::vector<double> u;

  double min() const;
  double max() const;
};

/// Physical inputs. epsilon == 0 selects the vanishing-aspect-ratio model.
struct ModelParams {
  double lambda = 1.0;
  double epsilon = 0.1;
  double q = 4.0;

  void validate() const;
};

/// Throws InvariantError unless the state lives on the grid, is clamped at
/// both ends, and stays strictly above the ground plate.
void check_admissible(const DeflectionState& state, const Grid1D& grid);

/// Composite trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> f, double h);

}  // namespace mems
