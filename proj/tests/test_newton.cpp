#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "cosserat/newton.hpp"

using namespace cosserat;

TEST_CASE("linear system converges in one iteration") {
  MatX a(3, 3);
  a << 4, 1, 0, 1, 3, 1, 0, 1, 5;
  VecX b(3);
  b << 1, -2, 0.5;
  auto residual = [&](const VecX& x) -> VecX { return a * x - b; };
  auto jacobian = [&](const VecX&) -> MatX { return a; };
  auto [x, stats] = newton_armijo_dense(residual, jacobian, VecX::Zero(3), SolverConfig{});
  CHECK(stats.newton_iterations == 1);
  CHECK((a * x - b).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("scalar square root of two") {
  auto residual = [](const VecX& x) -> VecX {
    VecX f(1);
    f[0] = x[0] * x[0] - 2.0;
    return f;
  };
  auto jacobian = [](const VecX& x) -> MatX {
    MatX j(1, 1);
    j(0, 0) = 2.0 * x[0];
    return j;
  };
  SolverConfig cfg;
  cfg.tol = 1e-14;  // effective tolerance 1e-14 * (1 + 1) well below 1e-12
  VecX x0(1);
  x0[0] = 1.0;
  auto [x, stats] = newton_armijo_dense(residual, jacobian, x0, cfg);
  CHECK(std::abs(x[0] - std::sqrt(2.0)) < 1e-12);
  CHECK(stats.newton_iterations <= 7);
}

TEST_CASE("rootless residual raises NonConvergence") {
  auto residual = [](const VecX& x) -> VecX {
    VecX f(1);
    f[0] = x[0] * x[0] + 1.0;
    return f;
  };
  auto jacobian = [](const VecX& x) -> MatX {
    MatX j(1, 1);
    j(0, 0) = 2.0 * x[0];
    return j;
  };
  VecX x0(1);
  x0[0] = 1.0;
  CHECK_THROWS_AS(newton_armijo_dense(residual, jacobian, x0, SolverConfig{}),
                  NonConvergenceError);
}

TEST_CASE("residual norm is monotone along accepted iterates") {
  // mildly nonlinear 2d system
  auto residual = [](const VecX& x) -> VecX {
    VecX f(2);
    f[0] = x[0] * x[0] + x[1] - 3.0;
    f[1] = std::sin(x[0]) + 2.0 * x[1] - 1.0;
    return f;
  };
  auto jacobian = [](const VecX& x) -> MatX {
    MatX j(2, 2);
    j << 2.0 * x[0], 1.0, std::cos(x[0]), 2.0;
    return j;
  };
  std::vector<double> norms;
  auto record = [&](int, const VecX&, double rnorm) { norms.push_back(rnorm); };
  VecX x0(2);
  x0 << 5.0, -4.0;
  auto [x, stats] = newton_armijo_dense(residual, jacobian, x0, SolverConfig{}, record);
  REQUIRE(norms.size() >= 2);
  for (std::size_t i = 1; i < norms.size(); ++i) CHECK(norms[i] <= norms[i - 1] * (1.0 + 1e-12));
  // termination tolerance is relative to the (large) initial residual
  CHECK(residual(x).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("already-converged start returns zero iterations") {
  auto residual = [](const VecX& x) -> VecX { return x; };
  auto jacobian = [](const VecX& x) -> MatX { return MatX::Identity(x.size(), x.size()); };
  auto [x, stats] = newton_armijo_dense(residual, jacobian, VecX::Zero(4), SolverConfig{});
  CHECK(stats.newton_iterations == 0);
  CHECK(x.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("fd_jacobian is exact on linear and quadratic maps") {
  MatX a(3, 3);
  a << 1, 2, 0, -1, 0.5, 3, 0, 0, -2;
  auto linear = [&](const VecX& x) -> VecX { return a * x; };
  VecX x0(3);
  x0 << 0.3, -1.2, 2.0;
  CHECK((fd_jacobian(linear, x0) - a).cwiseAbs().maxCoeff() < 1e-9);

  // central differences differentiate quadratics exactly
  auto quad = [](const VecX& x) -> VecX { return x.array().square().matrix(); };
  const MatX j = fd_jacobian(quad, x0);
  MatX expected = MatX::Zero(3, 3);
  for (int i = 0; i < 3; ++i) expected(i, i) = 2.0 * x0[i];
  CHECK((j - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("SolverConfig validation") {
  SolverConfig cfg;
  cfg.armijo_c = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.backtrack = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
