#include "mems/grid.hpp"

#include <algorithm>
#include <cmath>

namespace mems {

Grid1D::Grid1D(std::size_t n_x) : n_(n_x), h_(0.0) {
  if (n_x < 33 || n_x % 2 == 0) {
    throw InvariantError("n_x must be odd and at least 33, got " + std::to_string(n_x));
  }
  h_ = 2.0 / static_cast<double>(n_x - 1);
  nodes_.resize(n_x);
  for (std::size_t i = 0; i < n_x; ++i) nodes_[i] = -1.0 + static_cast<double>(i) * h_;
  nodes_.back() = 1.0;
}

MappedGrid::MappedGrid(std::size_t n_x, std::size_t n_eta) : base_(n_x), n_eta_(n_eta), d_eta_(0.0) {
  if (n_eta < 17) {
    throw InvariantError("n_eta must be at least 17, got " + std::to_string(n_eta));
  }
  d_eta_ = 1.0 / static_cast<double>(n_eta - 1);
}

double DeflectionState::min() const { return *std::min_element(u.begin(), u.end()); }
double DeflectionState::max() const { return *std::max_element(u.begin(), u.end()); }

void ModelParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvariantError("lambda must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InvariantError("epsilon must be non-negative");
  if (!(q > 2.0) || !std::isfinite(q)) throw InvariantError("q must exceed 2");
}

void check_admissible(const DeflectionState& state, const Grid1D& grid) {
  if (state.u.size() != grid.size()) {
    throw InvariantError("deflection has " + std::to_string(state.u.size()) + " values, grid has " +
                         std::to_string(grid.size()));
  }
  if (state.u.front() != 0.0 || state.u.back() != 0.0) {
    throw InvariantError("deflection must vanish at x = -1 and x = 1");
  }
  for (double v : state.u) {
    if (!std::isfinite(v)) throw InvariantError("deflection contains non-finite values");
    if (!(v > -1.0)) throw InvariantError("deflection touches the ground plate (min u <= -1)");
  }
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

}  // namespace mems
