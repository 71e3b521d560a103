#pragma once

#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mems/elliptic_potential.hpp"
#include "mems/grid.hpp"
#include "mems/trajectory.hpp"

namespace mems {

/// Principal Dirichlet eigenvalue of -d^2/dx^2 on (-1, 1).
inline constexpr double kMu1 = std::numbers::pi * std::numbers::pi / 4.0;

/// Principal eigenpair sampled on a grid; zeta1 = (pi/4) cos(pi x / 2) has unit mass.
struct Eigenpair {
  double mu1 = kMu1;
  std::vector<double> zeta1;
};

Eigenpair make_eigenpair(const Grid1D& grid);

/// E_alpha = int zeta1 (u + alpha u^2 / 2) dx, trapezoid rule.
double energy(std::span<const double> u, double alpha, const Grid1D& grid);
double energy(std::span<const double> u, double alpha, const Eigenpair& eig, double h);

/// Exponential upper envelope of E_alpha for data bounded above by max u0.
struct Lemma2Envelope {
  double alpha_max = 1.0;
  double C0 = 0.0;

  double operator()(double t) const;
};

Lemma2Envelope lemma2_envelope(double max_u0);
inline Lemma2Envelope lemma2_envelope(const DeflectionState& u0) { return lemma2_envelope(u0.max()); }

/// The increasing right-hand side of the energy differential inequality.
/// Throws std::domain_error for y <= -1.
double F_pdelta(double y, double p, double delta, double lambda, double epsilon);

ProofParams choose_parameters(double max_u0, double epsilon, double lambda);

/// Explicit voltage threshold above which finite-time singularity is certain.
double lambda_star(double max_u0, double epsilon);

/// Proof-chain majorant of F_pdelta(0) with (p, delta) chosen for lambda;
/// negative exactly when lambda > lambda_star.
double F_zero_majorant(double max_u0, double epsilon, double lambda);

/// Recovers lambda_star as the sign change of F_zero_majorant, by bisection.
double lambda_star_by_bisection(double max_u0, double epsilon, double tol = 1e-6);

/// Product trapezoid rule for int_0^1 eta^s f(eta) d eta on a uniform grid:
/// f is interpolated linearly per cell, the weight eta^s is integrated exactly.
std::vector<double> weighted_eta_weights(std::size_t n_eta, double s);

/// Gradients of psi on the physical domain, sampled at mapped nodes.
struct PhysicalGradients {
  NodalField psi_x;
  NodalField psi_z;
  /// phi / eta, extended to eta = 0 by phi_eta; clipped at zero.
  NodalField rho;
};

PhysicalGradients physical_gradients(const NodalField& phi, const DeflectionState& state, const MappedGrid& grid);

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

IdentityReport check_identity_p9(const DeflectionState& state, const PotentialField& field, double p,
                                 double epsilon, const MappedGrid& grid);

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool violated = false;
};

inline constexpr double kInequalityRelTol = 1e-4;

/// Lower bound of the weighted vertical Dirichlet energy; margin = rhs - lhs.
InequalityReport check_lower_bound_p8(const DeflectionState& state, const PotentialField& field, double p,
                                      const MappedGrid& grid, double rel_tol = kInequalityRelTol);

/// Jensen-type lower bound of int zeta1 (1 + eps^2 u_x^2) gamma_m in terms
/// of E_alpha; here lhs is the integral, rhs the bound.
InequalityReport check_jensen_bound_p10(const DeflectionState& state, const PotentialField& field, double p,
                                        double epsilon, double alpha, const MappedGrid& grid,
                                        double rel_tol = kInequalityRelTol);

struct DissipationTolerance {
  double c1 = 1.0;
  double c2 = 1.0;
  double rel = 1e-3;
};

struct DissipationViolation {
  double t1 = 0.0;
  double t2 = 0.0;
  double slope = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
};

/// Checks (E(t2) - E(t1)) / (t2 - t1) <= F(E(t1)) + tol on every consecutive
/// record pair, with F recomputed from proof (record F_of_E is not trusted).
std::vector<DissipationViolation> check_dissipation(const Trajectory& traj, const ProofParams& proof,
                                                    const DissipationTolerance& tol = {});

/// Times at which E_alpha exceeds the envelope by more than tol.
std::vector<double> check_envelope(const Trajectory& traj, const Lemma2Envelope& envelope, double tol = 1e-3);

struct SingularityCertificate {
  bool applicable = false;
  std::string reason;
  double lambda_star = 0.0;
  double y_root = 0.0;
  double y_pdelta = 0.0;
  double F_at_y = 0.0;
  double t_pdelta = 0.0;
  /// Record at which the linear barrier is anchored; negative if the run
  /// ended before t_pdelta and the a priori bound was used instead.
  double anchor_time = -1.0;
  double anchor_E = 0.0;
  double barrier_crossing_time = 0.0;
  /// Record times where observed E_alpha exceeds the barrier.
  std::vector<double> barrier_violations;
};

SingularityCertificate singularity_certificate(const Trajectory& traj, const ProofParams& proof,
                                               const Lemma2Envelope& envelope, double tol = 1e-9);

}  // namespace mems
