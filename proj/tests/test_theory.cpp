#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mems/parabolic_dynamics.hpp"
#include "mems/theory_checks.hpp"

using namespace mems;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double mu1 = pi * pi / 4.0;

DeflectionState profile(const Grid1D& grid, auto&& f) {
  DeflectionState s;
  s.u.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s.u[i] = f(grid.x(i));
  s.u.front() = s.u.back() = 0.0;
  return s;
}

DeflectionState flat(const Grid1D& grid) {
  return profile(grid, [](double) { return 0.0; });
}

double integrate(const Grid1D& grid, auto&& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(i);
  return trapezoid(v, grid.spacing());
}

}  // namespace

TEST_CASE("eigenpair") {
  CHECK(kMu1 == doctest::Approx(2.4674011));
  double prev_mass = 0.0;
  for (std::size_t n : {51u, 101u, 201u}) {
    const Grid1D grid(n);
    const Eigenpair e = make_eigenpair(grid);
    const double mass = std::abs(trapezoid(e.zeta1, grid.spacing()) - 1.0);
    const double sq = std::abs(integrate(grid, [&](std::size_t i) { return e.zeta1[i] * e.zeta1[i]; }) - pi * pi / 16.0);
    if (prev_mass > 0.0) {
      CHECK(prev_mass / mass == doctest::Approx(4.0).epsilon(0.05));
    }
    prev_mass = mass;
    CHECK(sq < 1e-12);  // cos^2 over a full period: trapezoid is exact
    // -zeta1'' = mu1 zeta1 up to O(h^2)
    const double h = grid.spacing();
    for (std::size_t i = 1; i + 1 < n; i += 7) {
      const double lap = (e.zeta1[i + 1] - 2.0 * e.zeta1[i] + e.zeta1[i - 1]) / (h * h);
      CHECK(std::abs(-lap - mu1 * e.zeta1[i]) < 2.0 * h * h);
    }
  }
  CHECK(prev_mass < 1e-4);
}

TEST_CASE("energy functional") {
  const Grid1D grid(401);
  CHECK(energy(flat(grid).u, 0.7, grid) == 0.0);
  const Eigenpair e = make_eigenpair(grid);
  CHECK(energy(e.zeta1, 0.0, grid) == doctest::Approx(pi * pi / 16.0).epsilon(1e-4));
  const DeflectionState half = profile(grid, [](double) { return -0.5; });
  CHECK(energy(half.u, 1.0, grid) == doctest::Approx(-0.375).epsilon(1e-4));
  CHECK(energy(half.u, 1.0, e, grid.spacing()) == energy(half.u, 1.0, grid));
}

TEST_CASE("energy stays above -1 for admissible states") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> depth(0.0, 0.999), alpha(0.0, 1.0), width(0.05, 2.0);
  const Grid1D grid(201);
  for (int k = 0; k < 200; ++k) {
    const double d = depth(rng), w = width(rng);
    const DeflectionState s = profile(grid, [&](double x) { return -d * std::exp(-x * x / (w * w)) * (1.0 - x * x); });
    CHECK(energy(s.u, alpha(rng), grid) > -1.0);
  }
}

TEST_CASE("energy envelope constants") {
  const Lemma2Envelope zero = lemma2_envelope(0.0);
  CHECK(zero.C0 == 0.0);
  CHECK(zero.alpha_max == 1.0);
  const Lemma2Envelope a = lemma2_envelope(0.2);
  CHECK(a.C0 == doctest::Approx(pi * 0.24));
  CHECK(a.C0 == doctest::Approx(0.754).epsilon(1e-3));
  CHECK(a.alpha_max == 1.0);
  CHECK(lemma2_envelope(1.0).C0 == doctest::Approx(2.0 * pi));
  CHECK(lemma2_envelope(3.0).alpha_max == doctest::Approx(0.5));
  CHECK(lemma2_envelope(-0.3).C0 == 0.0);
  CHECK(a(1.0) == doctest::Approx(a.C0 * std::exp(-mu1)));
}

TEST_CASE("F_pdelta") {
  // p = delta = 1, lambda = 4, eps = 1, y = 0: mu1 + 2 (mu1 - 3/4)
  CHECK(F_pdelta(0.0, 1.0, 1.0, 4.0, 1.0) == doctest::Approx(3.0 * mu1 - 1.5));
  CHECK(F_pdelta(0.0, 1.0, 1.0, 4.0, 1.0) == doctest::Approx(5.9022).epsilon(1e-5));
  // eps = 0, same p, delta, lambda: coefficient 4, bracket 1/4 - 1
  CHECK(F_pdelta(0.0, 1.0, 1.0, 4.0, 0.0) == doctest::Approx(mu1 - 3.0));
  // p = delta = lambda = eps = 1, y = 1: mu1 + (4/5)(3 mu1 / 2 - 1/4)
  CHECK(F_pdelta(1.0, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(2.2 * mu1 - 0.2));
  CHECK_THROWS_AS(F_pdelta(-1.0, 1.0, 1.0, 1.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(F_pdelta(-2.0, 1.0, 1.0, 1.0, 0.1), std::domain_error);
}

TEST_CASE("F_pdelta is increasing in y") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double p = 1.0 + u01(rng), delta = 0.1 + 3.0 * u01(rng), lambda = 0.1 + 50.0 * u01(rng),
                 eps = u01(rng);
    double prev = F_pdelta(-0.999, p, delta, lambda, eps);
    for (double y = -0.99; y < 5.0; y += 0.05) {
      const double f = F_pdelta(y, p, delta, lambda, eps);
      CHECK(f > prev);
      prev = f;
    }
  }
}

TEST_CASE("parameter recipe") {
  const ProofParams pp = choose_parameters(0.0, 0.1, 20.0);
  CHECK(pp.p == doctest::Approx(1.04935).epsilon(1e-5));
  CHECK(pp.alpha == doctest::Approx(0.01 / 1.01));
  CHECK(pp.alpha == doctest::Approx(0.009901).epsilon(1e-4));
  CHECK(pp.chi == 1.0);
  CHECK(pp.chi_eps == 0.0);
  CHECK(pp.delta == doctest::Approx(std::sqrt(20.0) / 2.0));
  CHECK(pp.delta == doctest::Approx(2.2361).epsilon(1e-4));
  CHECK(pp.lambda_star == doctest::Approx(lambda_star(0.0, 0.1)));

  const ProofParams big = choose_parameters(9.0, 1.0, 5.0);
  CHECK(big.chi_eps == doctest::Approx(2.0));
  CHECK(big.chi == doctest::Approx(2.0));
  const ProofParams edge = choose_parameters(3.0, 1.0, 5.0);
  CHECK(edge.chi_eps == doctest::Approx(1.0));
  CHECK(edge.chi == doctest::Approx(1.0));

  const ProofParams zero = choose_parameters(0.0, 0.0, 5.0);
  CHECK(zero.p == 1.0);
  CHECK(zero.alpha == 0.0);

  CHECK_THROWS(choose_parameters(0.0, 0.1, 0.0));
  CHECK_THROWS(choose_parameters(0.0, -0.1, 1.0));
}

TEST_CASE("alpha does not depend on lambda") {
  for (double m : {0.0, 0.5, 4.0, 20.0})
    for (double eps : {0.05, 0.3, 1.0}) {
      const double a1 = choose_parameters(m, eps, 1.0).alpha;
      CHECK(choose_parameters(m, eps, 10.0).alpha == doctest::Approx(a1).epsilon(1e-12));
      CHECK(choose_parameters(m, eps, 100.0).alpha == doctest::Approx(a1).epsilon(1e-12));
      CHECK(a1 <= lemma2_envelope(m).alpha_max + 1e-12);
    }
}

TEST_CASE("threshold voltage") {
  CHECK(lambda_star(0.0, 0.1) == doctest::Approx(13.428).epsilon(0.001 / 13.428));
  CHECK(lambda_star(0.0, 0.0) == doctest::Approx((1.0 + mu1) * (1.0 + mu1)));
  double prev = lambda_star(0.0, 0.0);
  for (double eps = 0.05; eps < 1.0; eps += 0.05) {
    const double l = lambda_star(0.0, eps);
    CHECK(l > prev);
    prev = l;
  }
  CHECK(lambda_star_by_bisection(0.0, 0.1, 1e-6) == doctest::Approx(lambda_star(0.0, 0.1)).epsilon(1e-6));
  CHECK(lambda_star_by_bisection(9.0, 1.0, 1e-6) == doctest::Approx(lambda_star(9.0, 1.0)).epsilon(1e-6));
}

TEST_CASE("above threshold the right-hand side is negative at zero") {
  for (auto [m, eps] : {std::pair{0.0, 0.1}, std::pair{0.0, 0.5}, std::pair{9.0, 1.0}, std::pair{0.2, 0.1}}) {
    const double ls = lambda_star(m, eps);
    const ProofParams pp = choose_parameters(m, eps, 1.01 * ls);
    CHECK(F_pdelta(0.0, pp.p, pp.delta, pp.lambda, eps) < 0.0);
    CHECK(F_zero_majorant(m, eps, 1.01 * ls) < 0.0);
    CHECK(F_zero_majorant(m, eps, 0.99 * ls) > 0.0);
    CHECK(F_zero_majorant(m, eps, 1.01 * ls) >= F_pdelta(0.0, pp.p, pp.delta, pp.lambda, eps));
  }
}

TEST_CASE("weighted eta quadrature") {
  for (double s : {0.0, 0.04935, 1.0, 2.04935}) {
    const std::size_t n = 17;
    const auto w = weighted_eta_weights(n, s);
    double lin = 0.0;
    for (std::size_t j = 0; j < n; ++j) lin += w[j] * (2.0 + 3.0 * j / double(n - 1));
    CHECK(lin == doctest::Approx(2.0 / (s + 1.0) + 3.0 / (s + 2.0)).epsilon(1e-13));
    auto err = [&](std::size_t m) {
      const auto ww = weighted_eta_weights(m, s);
      double q = 0.0;
      for (std::size_t j = 0; j < m; ++j) q += ww[j] * std::exp(double(j) / double(m - 1));
      double exact = 0.0;  // int_0^1 eta^s e^eta by fine midpoint sums
      const int k = 200000;
      for (int i = 0; i < k; ++i) {
        const double e = (i + 0.5) / k;
        exact += std::pow(e, s) * std::exp(e) / k;
      }
      return std::abs(q - exact);
    };
    CHECK(err(17) / err(33) == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("flat-plate identity balances to rounding") {
  const MappedGrid grid(101, 51);
  const DeflectionState s = flat(grid.base());
  for (double eps : {0.01, 0.1, 1.0}) {
    const PotentialField f = solve_potential(s, ModelParams{1.0, eps, 4.0}, grid);
    for (double p : {1.0, 1.0 + 2.0 * mu1 * eps * eps, 2.0}) {
      const IdentityReport r = check_identity_p9(s, f, p, eps, grid);
      CHECK(r.residual <= 1e-8);
    }
  }
}

TEST_CASE("identity residual converges on a curved plate") {
  const double eps = 0.1;
  const double p = 1.0 + 2.0 * mu1 * eps * eps;
  auto residual = [&](std::size_t nx) {
    const MappedGrid grid(nx, (nx + 1) / 2);
    const DeflectionState s = profile(grid.base(), [](double x) { return -0.3 * std::cos(pi * x / 2.0); });
    const PotentialField f = solve_potential(s, ModelParams{1.0, eps, 4.0}, grid);
    return check_identity_p9(s, f, p, eps, grid).residual;
  };
  const double r1 = residual(51), r2 = residual(101), r3 = residual(201);
  CHECK(r1 / r2 >= 3.0);
  CHECK(r2 / r3 >= 3.0);
}

TEST_CASE("identity at epsilon zero reduces to the trace integral") {
  const MappedGrid grid(101, 51);
  const DeflectionState s = profile(grid.base(), [](double x) { return -0.4 * std::cos(pi * x / 2.0); });
  const PotentialField f = solve_potential(s, ModelParams{1.0, 0.0, 4.0}, grid);
  const IdentityReport r = check_identity_p9(s, f, 1.0, 0.0, grid);
  CHECK(r.residual < 1e-10 * std::max(1.0, r.lhs));
}

TEST_CASE("vertical Dirichlet lower bound") {
  const MappedGrid grid(101, 51);
  const DeflectionState s = flat(grid.base());
  const PotentialField f = solve_potential(s, ModelParams{1.0, 0.1, 4.0}, grid);
  const double mass = trapezoid(make_eigenpair(grid.base()).zeta1, grid.hx());
  const InequalityReport two = check_lower_bound_p8(s, f, 2.0, grid);
  CHECK(two.margin == doctest::Approx(mass / 9.0).epsilon(1e-10));
  CHECK_FALSE(two.violated);
  const InequalityReport one = check_lower_bound_p8(s, f, 1.0, grid);
  CHECK(std::abs(one.margin) < 1e-12);
  CHECK_FALSE(one.violated);

  const DeflectionState curved = profile(grid.base(), [](double x) { return -0.5 * std::cos(pi * x / 2.0); });
  const PotentialField fc = solve_potential(curved, ModelParams{1.0, 0.3, 4.0}, grid);
  CHECK_FALSE(check_lower_bound_p8(curved, fc, 1.2, grid).violated);
}

TEST_CASE("Jensen-type bound") {
  const MappedGrid grid(101, 51);
  const DeflectionState s = flat(grid.base());
  const double eps = 0.1;
  const ProofParams pp = choose_parameters(0.0, eps, 14.0);
  const PotentialField f = solve_potential(s, ModelParams{14.0, eps, 4.0}, grid);
  const InequalityReport r = check_jensen_bound_p10(s, f, pp.p, eps, pp.alpha, grid);
  const double bound = 1.0 / pp.p - mu1 * eps * eps / (pp.p * pp.p);
  CHECK(r.rhs == doctest::Approx(bound).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(0.9306).epsilon(1e-4));
  CHECK(r.margin == doctest::Approx(1.0 - bound).epsilon(1e-3));
  CHECK(r.margin == doctest::Approx(0.069).epsilon(0.01));
  CHECK_FALSE(r.violated);

  // epsilon = 0 is plain Jensen: int zeta1 / (1+u) >= 1 / (1 + E_0)
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-0.8, 0.8);
  for (int k = 0; k < 20; ++k) {
    const double a = d(rng), b = d(rng) / 4.0;
    const DeflectionState c = profile(grid.base(), [&](double x) {
      return a * std::cos(pi * x / 2.0) + b * std::sin(pi * x);
    });
    if (c.min() <= -0.95) continue;
    const PotentialField fc = solve_potential(c, ModelParams{1.0, 0.0, 4.0}, grid);
    CHECK_FALSE(check_jensen_bound_p10(c, fc, 1.0, 0.0, 0.0, grid).violated);
  }
}

TEST_CASE("dissipation check on pure heat flow") {
  const Grid1D grid(201);
  const Eigenpair eig = make_eigenpair(grid);
  Trajectory traj;
  traj.hx = grid.spacing();
  traj.proof = ProofParams{};
  traj.proof.lambda = 0.0;
  std::vector<double> u(eig.zeta1);
  for (double& v : u) v *= -0.5;
  const double dt = 1e-3;
  for (int k = 0; k <= 200; ++k) {
    DiagnosticsRecord r;
    r.t = k * dt;
    r.dt = k == 0 ? 0.0 : dt;
    r.E_alpha = energy(u, 0.0, grid);
    traj.records.push_back(r);
    if (k > 0) {
      const double slope = (traj.records[k].E_alpha - traj.records[k - 1].E_alpha) / dt;
      CHECK(slope == doctest::Approx(-mu1 * traj.records[k - 1].E_alpha).epsilon(0.01));
    }
    u = solve_implicit_diffusion(u, dt, grid.spacing());
  }
  CHECK(check_dissipation(traj, traj.proof).empty());

  // with a load present the bound is tighter; a jump up in E must be flagged
  traj.proof = choose_parameters(0.0, 0.1, 14.0);
  traj.records[100].E_alpha += 0.5;
  CHECK_FALSE(check_dissipation(traj, traj.proof).empty());
}

TEST_CASE("envelope check") {
  Trajectory traj;
  const Lemma2Envelope env = lemma2_envelope(0.2);
  for (int k = 0; k < 10; ++k) {
    DiagnosticsRecord r;
    r.t = 0.1 * k;
    r.E_alpha = env(r.t) - 0.01;
    traj.records.push_back(r);
  }
  CHECK(check_envelope(traj, env).empty());
  traj.records[4].E_alpha = env(0.4) + 0.01;
  REQUIRE(check_envelope(traj, env).size() == 1);
  CHECK(check_envelope(traj, env)[0] == doctest::Approx(0.4));
}

TEST_CASE("singularity certificate") {
  const MappedGrid grid(101, 51);
  DeflectionState u0;
  u0.u.assign(grid.nx(), 0.0);
  StepControls c;
  const SimulationResult r = run_simulation(ModelParams{14.0, 0.1, 4.0}, u0, c, grid);
  REQUIRE(r.outcome.kind == OutcomeKind::Touchdown);
  const ProofParams& pp = r.trajectory.proof;
  const SingularityCertificate cert = singularity_certificate(r.trajectory, pp, lemma2_envelope(u0));
  REQUIRE(cert.applicable);
  CHECK(F_pdelta(cert.y_root, pp.p, pp.delta, pp.lambda, pp.epsilon) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(cert.y_pdelta == doctest::Approx(cert.y_root / 2.0));
  CHECK(cert.F_at_y < 0.0);
  CHECK(cert.t_pdelta == 0.0);
  CHECK(cert.anchor_time == 0.0);
  CHECK(cert.barrier_violations.empty());
  CHECK(cert.barrier_crossing_time >= r.outcome.T);

  const ProofParams below = choose_parameters(0.0, 0.1, 5.0);
  const SingularityCertificate none = singularity_certificate(r.trajectory, below, lemma2_envelope(u0));
  CHECK_FALSE(none.applicable);
  CHECK(none.reason.find("inapplicable") != std::string::npos);

  // positive data: the anchor waits for the envelope to fall below y
  Trajectory short_run = r.trajectory;
  const SingularityCertificate late = singularity_certificate(short_run, pp, lemma2_envelope(0.2));
  CHECK(late.t_pdelta > 0.0);
  CHECK(late.t_pdelta == doctest::Approx(std::log(lemma2_envelope(0.2).C0 / late.y_pdelta) / mu1));
}
