#include "mems/theory_checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mems {

namespace {

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

std::vector<double> eta_derivative_column(const NodalField& phi, std::size_t i, double he) {
  const std::size_t n = phi.neta();
  std::vector<double> d(n);
  for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (phi(i, j + 1) - phi(i, j - 1)) / (2.0 * he);
  d[0] = (-3.0 * phi(i, 0) + 4.0 * phi(i, 1) - phi(i, 2)) / (2.0 * he);
  d[n - 1] = (3.0 * phi(i, n - 1) - 4.0 * phi(i, n - 2) + phi(i, n - 3)) / (2.0 * he);
  return d;
}

// int_D zeta1 (1 + u) [ int_0^1 eta^s f(x, eta) d eta ] dx
template <typename Integrand>
double mapped_volume_integral(const Eigenpair& eig, const DeflectionState& state, const MappedGrid& grid,
                              std::span<const double> eta_weights, Integrand&& f) {
  std::vector<double> column(grid.nx());
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.neta(); ++j) s += eta_weights[j] * f(i, j);
    column[i] = eig.zeta1[i] * (1.0 + state.u[i]) * s;
  }
  return trapezoid(column, grid.hx());
}

double jensen_lhs(const Eigenpair& eig, const DeflectionState& state, const PotentialField& field, double epsilon,
                  const Grid1D& grid) {
  const std::vector<double> ux = first_derivative(state.u, grid.spacing());
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = eig.zeta1[i] * (1.0 + epsilon * epsilon * ux[i] * ux[i]) * field.gamma_m[i];
  return trapezoid(f, grid.spacing());
}

}  // namespace

Eigenpair make_eigenpair(const Grid1D& grid) {
  Eigenpair e;
  e.zeta1.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    e.zeta1[i] = std::numbers::pi / 4.0 * std::cos(std::numbers::pi * grid.x(i) / 2.0);
  }
  e.zeta1.front() = 0.0;
  e.zeta1.back() = 0.0;
  return e;
}

double energy(std::span<const double> u, double alpha, const Eigenpair& eig, double h) {
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] = eig.zeta1[i] * (u[i] + 0.5 * alpha * u[i] * u[i]);
  return trapezoid(f, h);
}

double energy(std::span<const double> u, double alpha, const Grid1D& grid) {
  return energy(u, alpha, make_eigenpair(grid), grid.spacing());
}

double Lemma2Envelope::operator()(double t) const { return C0 * std::exp(-kMu1 * t); }

Lemma2Envelope lemma2_envelope(double max_u0) {
  const double m = positive_part(max_u0);
  Lemma2Envelope env;
  env.alpha_max = std::clamp(2.0 / (1.0 + m), 0.0, 1.0);
  env.C0 = std::numbers::pi * (m + m * m);
  return env;
}

double F_pdelta(double y, double p, double delta, double lambda, double epsilon) {
  if (!(y > -1.0)) throw std::domain_error("F_pdelta requires y > -1");
  const double eps2 = epsilon * epsilon;
  const double coeff = 4.0 * delta * lambda / (p * (lambda * eps2 + 4.0 * delta * delta));
  const double bracket = kMu1 * eps2 / p + p / (4.0 * delta) + p * kMu1 * eps2 / (p + 1.0) * y - 1.0 / (1.0 + y);
  return kMu1 + coeff * bracket;
}

ProofParams choose_parameters(double max_u0, double epsilon, double lambda) {
  if (!(epsilon >= 0.0) || !(lambda > 0.0)) throw std::invalid_argument("choose_parameters needs eps >= 0, lambda > 0");
  const double m = positive_part(max_u0);
  const double eps2 = epsilon * epsilon;
  ProofParams pp;
  pp.lambda = lambda;
  pp.epsilon = epsilon;
  pp.chi_eps = epsilon * std::sqrt(positive_part(m - 1.0) / 2.0);
  pp.chi = std::max(1.0, pp.chi_eps);
  pp.p = 1.0 + 2.0 * kMu1 * eps2;
  pp.delta = pp.chi * std::sqrt(lambda) / 2.0;
  pp.alpha = lambda * eps2 / (lambda * eps2 + 4.0 * pp.delta * pp.delta);
  const double alpha_reduced = eps2 / (eps2 + pp.chi * pp.chi);
  if (std::abs(pp.alpha - alpha_reduced) > 1e-12 * std::max(1.0, alpha_reduced)) {
    throw std::logic_error("alpha depends on lambda; parameter recipe is inconsistent");
  }
  pp.lambda_star = lambda_star(max_u0, epsilon);
  return pp;
}

double lambda_star(double max_u0, double epsilon) {
  const double m = positive_part(max_u0);
  const double eps2 = epsilon * epsilon;
  const double chi = std::max(1.0, epsilon * std::sqrt(positive_part(m - 1.0) / 2.0));
  const double p = 1.0 + 2.0 * kMu1 * eps2;
  const double root = p / chi * (1.0 + kMu1 * (chi * chi + eps2));
  return root * root;
}

double F_zero_majorant(double max_u0, double epsilon, double lambda) {
  const ProofParams pp = choose_parameters(max_u0, epsilon, lambda);
  const double eps2 = epsilon * epsilon;
  const double coeff = 4.0 * pp.delta * lambda / (pp.p * (lambda * eps2 + 4.0 * pp.delta * pp.delta));
  // mu1 eps^2 / p < 1/2 for p = 1 + 2 mu1 eps^2
  return F_pdelta(0.0, pp.p, pp.delta, lambda, epsilon) + coeff * (0.5 - kMu1 * eps2 / pp.p);
}

double lambda_star_by_bisection(double max_u0, double epsilon, double tol) {
  double lo = 1e-12;
  double hi = 1.0;
  while (F_zero_majorant(max_u0, epsilon, hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) throw std::runtime_error("no sign change of the F(0) majorant");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (F_zero_majorant(max_u0, epsilon, mid) < 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> weighted_eta_weights(std::size_t n_eta, double s) {
  std::vector<double> w(n_eta, 0.0);
  const double h = 1.0 / static_cast<double>(n_eta - 1);
  for (std::size_t j = 0; j + 1 < n_eta; ++j) {
    const double a = static_cast<double>(j) * h;
    const double b = j + 2 == n_eta ? 1.0 : static_cast<double>(j + 1) * h;
    const double m0 = (std::pow(b, s + 1.0) - std::pow(a, s + 1.0)) / (s + 1.0);
    const double m1 = (std::pow(b, s + 2.0) - std::pow(a, s + 2.0)) / (s + 2.0);
    w[j] += (b * m0 - m1) / (b - a);
    w[j + 1] += (m1 - a * m0) / (b - a);
  }
  return w;
}

PhysicalGradients physical_gradients(const NodalField& phi, const DeflectionState& state, const MappedGrid& grid) {
  const std::size_t nx = grid.nx();
  const std::size_t ne = grid.neta();
  const double hx = grid.hx();
  const double he = grid.heta();
  const std::vector<double> ux = first_derivative(state.u, hx);

  PhysicalGradients out{NodalField(nx, ne), NodalField(nx, ne), NodalField(nx, ne)};
  std::vector<double> row(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const std::vector<double> phi_eta = eta_derivative_column(phi, i, he);
    const double gap = 1.0 + state.u[i];
    for (std::size_t j = 0; j < ne; ++j) {
      double phi_x = 0.0;
      if (i == 0) {
        phi_x = (-3.0 * phi(0, j) + 4.0 * phi(1, j) - phi(2, j)) / (2.0 * hx);
      } else if (i + 1 == nx) {
        phi_x = (3.0 * phi(i, j) - 4.0 * phi(i - 1, j) + phi(i - 2, j)) / (2.0 * hx);
      } else {
        phi_x = (phi(i + 1, j) - phi(i - 1, j)) / (2.0 * hx);
      }
      const double eta = grid.eta(j);
      out.psi_x(i, j) = phi_x - phi_eta[j] * eta * ux[i] / gap;
      out.psi_z(i, j) = phi_eta[j] / gap;
      out.rho(i, j) = std::max(0.0, j == 0 ? phi_eta[0] : phi(i, j) / eta);
    }
  }
  return out;
}

IdentityReport check_identity_p9(const DeflectionState& state, const PotentialField& field, double p,
                                 double epsilon, const MappedGrid& grid) {
  const Eigenpair eig = make_eigenpair(grid.base());
  const PhysicalGradients pg = physical_gradients(field.phi, state, grid);
  const double eps2 = epsilon * epsilon;

  IdentityReport rep;
  rep.lhs = jensen_lhs(eig, state, field, epsilon, grid.base());

  const std::vector<double> w_low = weighted_eta_weights(grid.neta(), p - 1.0);
  const std::vector<double> w_high = weighted_eta_weights(grid.neta(), p + 1.0);
  const double dirichlet = mapped_volume_integral(eig, state, grid, w_low, [&](std::size_t i, std::size_t j) {
    const double px = pg.psi_x(i, j);
    const double pz = pg.psi_z(i, j);
    return std::pow(pg.rho(i, j), p - 1.0) * (eps2 * px * px + pz * pz);
  });
  const double mass = mapped_volume_integral(eig, state, grid, w_high,
                                             [&](std::size_t i, std::size_t j) { return std::pow(pg.rho(i, j), p + 1.0); });
  // The constant term carries int zeta1 = 1; use the discrete mass so that
  // the flat plate balances to rounding.
  const double zeta_mass = trapezoid(eig.zeta1, grid.hx());
  const double zeta_u = energy(state.u, 0.0, eig, grid.hx());

  rep.rhs = p * dirichlet + kMu1 * eps2 / (p + 1.0) * mass - kMu1 * eps2 / ((p + 1.0) * (p + 2.0)) * zeta_mass -
            kMu1 * eps2 / (p + 1.0) * zeta_u;
  rep.residual = std::abs(rep.lhs - rep.rhs);
  return rep;
}

InequalityReport check_lower_bound_p8(const DeflectionState& state, const PotentialField& field, double p,
                                      const MappedGrid& grid, double rel_tol) {
  const Eigenpair eig = make_eigenpair(grid.base());
  const PhysicalGradients pg = physical_gradients(field.phi, state, grid);

  std::vector<double> f(grid.nx());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = eig.zeta1[i] / (1.0 + state.u[i]);
  InequalityReport rep;
  rep.lhs = 4.0 * p / ((p + 1.0) * (p + 1.0)) * trapezoid(f, grid.hx());

  const std::vector<double> w = weighted_eta_weights(grid.neta(), p - 1.0);
  rep.rhs = p * mapped_volume_integral(eig, state, grid, w, [&](std::size_t i, std::size_t j) {
              const double pz = pg.psi_z(i, j);
              return std::pow(pg.rho(i, j), p - 1.0) * pz * pz;
            });
  rep.margin = rep.rhs - rep.lhs;
  rep.tolerance = rel_tol * std::abs(rep.rhs);
  rep.violated = rep.margin < -rep.tolerance;
  return rep;
}

InequalityReport check_jensen_bound_p10(const DeflectionState& state, const PotentialField& field, double p,
                                        double epsilon, double alpha, const MappedGrid& grid, double rel_tol) {
  const Eigenpair eig = make_eigenpair(grid.base());
  const double eps2 = epsilon * epsilon;
  const double E = energy(state.u, alpha, eig, grid.hx());

  InequalityReport rep;
  rep.lhs = jensen_lhs(eig, state, field, epsilon, grid.base());
  rep.rhs = 1.0 / (p * (1.0 + E)) - kMu1 * eps2 / (p * p) - kMu1 * eps2 / (p + 1.0) * E;
  rep.margin = rep.lhs - rep.rhs;
  rep.tolerance = rel_tol * std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  rep.violated = rep.margin < -rep.tolerance;
  return rep;
}

std::vector<DissipationViolation> check_dissipation(const Trajectory& traj, const ProofParams& proof,
                                                    const DissipationTolerance& tol) {
  std::vector<DissipationViolation> out;
  const double h2 = traj.hx * traj.hx;
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    const auto& r1 = traj.records[k - 1];
    const auto& r2 = traj.records[k];
    const double dt = r2.t - r1.t;
    DissipationViolation v{r1.t, r2.t, 0.0, 0.0, 0.0};
    if (!(dt > 0.0) || !(r1.E_alpha > -1.0)) {
      v.slope = std::numeric_limits<double>::infinity();
      v.bound = -std::numeric_limits<double>::infinity();
      out.push_back(v);
      continue;
    }
    v.slope = (r2.E_alpha - r1.E_alpha) / dt;
    v.bound = F_pdelta(r1.E_alpha, proof.p, proof.delta, proof.lambda, proof.epsilon);
    v.tolerance = tol.c1 * h2 + tol.c2 * dt + tol.rel * (1.0 + std::abs(v.bound));
    if (!(v.slope <= v.bound + v.tolerance)) out.push_back(v);
  }
  return out;
}

std::vector<double> check_envelope(const Trajectory& traj, const Lemma2Envelope& envelope, double tol) {
  std::vector<double> out;
  for (const auto& r : traj.records) {
    if (!(r.E_alpha <= envelope(r.t) + tol)) out.push_back(r.t);
  }
  return out;
}

SingularityCertificate singularity_certificate(const Trajectory& traj, const ProofParams& proof,
                                               const Lemma2Envelope& envelope, double tol) {
  SingularityCertificate cert;
  cert.lambda_star = proof.lambda_star;
  if (!(proof.lambda > proof.lambda_star)) {
    cert.reason = "certificate inapplicable: lambda <= lambda_star";
    return cert;
  }
  auto F = [&](double y) { return F_pdelta(y, proof.p, proof.delta, proof.lambda, proof.epsilon); };
  if (!(F(0.0) < 0.0)) {
    cert.reason = "certificate inapplicable: F(0) >= 0";
    return cert;
  }

  double lo = 0.0;
  double hi = 1.0;
  while (F(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) {
      cert.reason = "F has no positive root";
      return cert;
    }
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) < 0.0 ? lo : hi) = mid;
  }
  cert.applicable = true;
  cert.y_root = 0.5 * (lo + hi);
  cert.y_pdelta = 0.5 * cert.y_root;
  cert.F_at_y = F(cert.y_pdelta);
  cert.t_pdelta = envelope.C0 > cert.y_pdelta ? std::log(envelope.C0 / cert.y_pdelta) / kMu1 : 0.0;

  const auto anchor = std::find_if(traj.records.begin(), traj.records.end(),
                                   [&](const DiagnosticsRecord& r) { return r.t >= cert.t_pdelta; });
  if (anchor == traj.records.end()) {
    cert.barrier_crossing_time = cert.t_pdelta + (-1.0 - cert.y_pdelta) / cert.F_at_y;
    return cert;
  }
  cert.anchor_time = anchor->t;
  cert.anchor_E = anchor->E_alpha;
  cert.barrier_crossing_time = cert.anchor_time + (-1.0 - cert.anchor_E) / cert.F_at_y;
  for (auto it = anchor; it != traj.records.end(); ++it) {
    const double barrier = cert.anchor_E + cert.F_at_y * (it->t - cert.anchor_time);
    if (it->E_alpha > barrier + tol) cert.barrier_violations.push_back(it->t);
  }
  return cert;
}

}  // namespace mems
