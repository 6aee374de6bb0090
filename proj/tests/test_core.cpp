#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "cosserat/core.hpp"
#include "cosserat/experiments.hpp"

using namespace cosserat;

TEST_CASE("rotation2d at reference angles") {
  Mat2 d0 = rotation2d(0.0);
  CHECK(d0(0, 0) == doctest::Approx(0.0));
  CHECK(d0(0, 1) == doctest::Approx(1.0));
  CHECK(d0(1, 0) == doctest::Approx(1.0));
  CHECK(d0(1, 1) == doctest::Approx(0.0));

  Mat2 d90 = rotation2d(M_PI / 2.0);
  CHECK(d90(0, 0) == doctest::Approx(-1.0));
  CHECK(std::abs(d90(0, 1)) < 1e-15);
  CHECK(std::abs(d90(1, 0)) < 1e-15);
  CHECK(d90(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("rotation2d is an orthogonal involution with det -1") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = u(rng);
    const Mat2 d = rotation2d(alpha);
    CHECK(((d * d) - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(((d.transpose() * d) - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(d.determinant() == doctest::Approx(-1.0).epsilon(1e-13));
  }
}

TEST_CASE("rotation2d_deriv matches finite differences") {
  const double h = 1e-6;
  for (double alpha : {0.0, 0.4, -1.3, 2.9}) {
    const Mat2 fd = (rotation2d(alpha + h) - rotation2d(alpha - h)) / (2.0 * h);
    CHECK((fd - rotation2d_deriv(alpha)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("perp") {
  CHECK(perp(Vec2(1, 0)) == Vec2(0, 1));
  CHECK(perp(Vec2(0, 1)) == Vec2(-1, 0));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 z(u(rng), u(rng));
    CHECK((perp(perp(z)) + z).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("l2_norm of simple sequences") {
  const int n = 100;
  std::vector<double> ones(n + 1, 1.0), zeros(n + 1, 0.0);
  CHECK(l2_norm(ones, 1.0 / n) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l2_norm(zeros, 1.0 / n) == 0.0);
}

TEST_CASE("l2_norm of f(s)=s against the closed-form integral") {
  // integral of s^2 over [0,1] is 1/3; trapezoid error stays below 1e-4
  const int n = 100;
  std::vector<double> f(n + 1);
  for (int i = 0; i <= n; ++i) f[i] = static_cast<double>(i) / n;
  CHECK(std::abs(l2_norm(f, 1.0 / n) - std::sqrt(1.0 / 3.0)) < 1e-4);
}

TEST_CASE("l2_norm is absolutely homogeneous") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StateField f(9, 41);
  for (int i = 0; i < 41; ++i)
    for (int c = 0; c < 9; ++c) f.node(i)[c] = u(rng);
  const double ds = 1.0 / 40;
  for (double c : {-3.5, 0.25, 7.0}) {
    CHECK(l2_norm(c * f, ds) == doctest::Approx(std::abs(c) * l2_norm(f, ds)).epsilon(1e-12));
  }
}

TEST_CASE("l2_norm rejects grid mismatch") {
  std::vector<double> f(11, 1.0);
  CHECK_THROWS_AS(l2_norm(f, 0.3), std::invalid_argument);
}

TEST_CASE("Parameters invariants") {
  Parameters p;
  CHECK_NOTHROW(p.validate());
  p.a = 3.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.a = 2.5;
  p.mu = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.mu = 10.0;
  p.epsilon = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("GridSpec invariants") {
  GridSpec g;
  CHECK_NOTHROW(g.validate());
  CHECK(g.ds() * g.n_cells == doctest::Approx(1.0).epsilon(1e-15));
  g.lambda = 0.3;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("StateField serialization round-trip is identity") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  StateField f(9, 13);
  for (int i = 0; i < 13; ++i)
    for (int c = 0; c < 9; ++c) f.node(i)[c] = u(rng);

  std::stringstream ss;
  write_trajectory_header(ss, false);
  write_trajectory_block(ss, 0.5, f, nullptr);
  auto levels = read_trajectory_csv(ss, 9);
  REQUIRE(levels.size() == 1);
  CHECK(levels[0].first == 0.5);
  CHECK(levels[0].second.n_nodes() == 13);
  CHECK((levels[0].second.data() - f.data()).lpNorm<Eigen::Infinity>() == 0.0);
}
