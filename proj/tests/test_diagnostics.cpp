#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cosserat/diagnostics.hpp"
#include "cosserat/planar.hpp"

using namespace cosserat;
namespace ix = planar_idx;

TEST_CASE("energy_w0 vanishes at the cantilever initial state") {
  GridSpec grid;
  grid.n_cells = 40;
  const StateField f = initial_state_planar(grid);
  Parameters p;
  CHECK(energy_w0(f, p, true) == 0.0);
  CHECK(energy_w0(f, p, false) == 0.0);
}

TEST_CASE("energy_w0 of a pure bending state") {
  // v = 0, kappa = 1, mu = 10: density kappa^2/(2 mu^2) = 5e-3 everywhere
  GridSpec grid;
  grid.n_cells = 25;
  StateField f = initial_state_planar(grid);
  for (int i = 0; i <= 25; ++i) f.node(i)[ix::kappa] = 1.0;
  Parameters p;  // mu = 10
  CHECK(energy_w0(f, p, false) == doctest::Approx(5e-3).epsilon(1e-13));
}

TEST_CASE("energy_w0 ignores r1 translations") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridSpec grid;
  grid.n_cells = 10;
  StateField f(kPlanarUnknowns, 11);
  for (int i = 0; i <= 10; ++i)
    for (int c = 0; c < 9; ++c) f.node(i)[c] = u(rng);
  Parameters p;
  const double base = energy_w0(f, p, true);
  for (int i = 0; i <= 10; ++i) f.node(i)[ix::r1] += 3.7;
  CHECK(energy_w0(f, p, true) == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("energy_w1 transcription and affineness") {
  GridSpec grid;
  grid.n_cells = 30;
  Parameters p;  // mu = 10, a = 2.5
  StateField limit(kPlanarUnknowns, 31), corr(kPlanarUnknowns, 31);

  SUBCASE("both states at rest") {
    CHECK(energy_w1(limit, corr, p) == 0.0);
  }

  SUBCASE("zero correction leaves the omega and n quadratics") {
    const double om = 0.4, n1 = -0.2, n3 = 0.7;
    for (int i = 0; i <= 30; ++i) {
      limit.node(i)[ix::omega] = om;
      limit.node(i)[ix::n1] = n1;
      limit.node(i)[ix::n3] = n3;
    }
    Parameters pz = p;
    pz.gravity = false;
    const double mu2 = p.mu * p.mu;
    const double want = 0.5 * om * om + 0.5 * mu2 * p.a * (n1 * n1 + n3 * n3 / p.a);
    CHECK(energy_w1(limit, corr, pz) == doctest::Approx(want).epsilon(1e-13));
  }

  SUBCASE("affine in the correction state") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i <= 30; ++i)
      for (int c = 0; c < 9; ++c) {
        limit.node(i)[c] = u(rng);
        corr.node(i)[c] = u(rng);
      }
    const double e0 = energy_w1(limit, 0.0 * corr, p);
    const double e1 = energy_w1(limit, corr, p);
    const double e2 = energy_w1(limit, 2.0 * corr, p);
    CHECK(e2 - e1 == doctest::Approx(e1 - e0).epsilon(1e-10));
  }
}

TEST_CASE("convergence_order recovers exact power laws") {
  std::vector<double> h = {0.1, 0.05, 0.025};
  std::vector<double> e2;
  std::vector<double> e1;
  for (double x : h) {
    e2.push_back(3.7 * x * x);
    e1.push_back(0.2 * x);
  }
  CHECK(convergence_order(h, e2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(convergence_order(h, e1) == doctest::Approx(1.0).epsilon(1e-12));

  // scaling all errors by a constant shifts the intercept only
  std::vector<double> scaled = e2;
  for (double& x : scaled) x *= 11.0;
  CHECK(convergence_order(h, scaled) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(convergence_order({0.1}, {0.01}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_order({0.1, -0.05}, {0.01, 0.001}), std::invalid_argument);
}

TEST_CASE("fit window selection") {
  std::vector<double> h, e;
  for (int k = 0; k < 8; ++k) {
    const double step = 0.1 * std::pow(0.5, k);
    h.push_back(step);
    e.push_back(step * step);
  }
  // corrupt a point outside the window; the fit must not see it
  e[0] = 1e3;
  int pts = 0;
  const double p = fit_order_in_window(h, e, 1e-3, 0.03, 1e-300, &pts);
  CHECK(pts == 5);
  CHECK(p == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("asymptotic consistency identities") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int nodes = 21;
  const double ds = 1.0 / (nodes - 1);
  StateField phi0(kPlanarUnknowns, nodes), phi1(kPlanarUnknowns, nodes);
  for (int i = 0; i < nodes; ++i)
    for (int c = 0; c < 9; ++c) {
      phi0.node(i)[c] = u(rng);
      phi1.node(i)[c] = u(rng);
    }
  const double eps = 1e-3;
  const StateField phi_eps = phi0 + (eps * eps) * phi1;
  const ConsistencyReport rep = asymptotic_consistency(phi_eps, phi0, phi1, eps, ds);
  CHECK(rep.norm_c2_star < 1e-14);
  CHECK(rep.norm_c1 == doctest::Approx(l2_norm(phi1, ds)).epsilon(1e-10));
  CHECK(rep.norm_c1_star == doctest::Approx(eps * eps * rep.norm_c1).epsilon(1e-14));
  CHECK(rep.norm_phi1 == doctest::Approx(l2_norm(phi1, ds)).epsilon(1e-14));
  CHECK_THROWS_AS(asymptotic_consistency(phi_eps, phi0, phi1, 0.0, ds), std::invalid_argument);
}

TEST_CASE("energy_w0 is nonnegative without gravity") {
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Parameters p;
  for (int trial = 0; trial < 50; ++trial) {
    StateField f(kPlanarUnknowns, 9);
    for (int i = 0; i < 9; ++i)
      for (int c = 0; c < 9; ++c) f.node(i)[c] = u(rng);
    CHECK(energy_w0(f, p, false) >= 0.0);
  }
}
