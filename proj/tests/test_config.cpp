#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "cosserat/config.hpp"
#include "cosserat/experiments.hpp"

using namespace cosserat;

TEST_CASE("empty config yields the cantilever defaults") {
  const RunConfig cfg = parse_config("");
  CHECK(cfg.params.froude == 1.0);
  CHECK(cfg.params.mu == 10.0);
  CHECK(cfg.params.a == 2.5);
  CHECK(cfg.params.epsilon == 0.0);
  CHECK(cfg.params.gravity);
  CHECK(cfg.grid.n_cells == 100);
  CHECK(cfg.grid.dt == 1e-2);
  CHECK(cfg.grid.lambda == 1.0);
  CHECK(cfg.t_end == 2.5);
  CHECK(cfg.variant == Variant::S);
  CHECK(cfg.kind == SystemKind::Limit);
}

TEST_CASE("comments, whitespace and overrides") {
  const RunConfig cfg = parse_config(
      "# run setup\n"
      "  epsilon = 0.02   # transition value\n"
      "\n"
      "variant = M\n"
      "kind = eps\n"
      "dt = 5e-3\n"
      "n_cells = 200\n"
      "lambda = 0.5\n"
      "out = traj.csv\n");
  CHECK(cfg.params.epsilon == 0.02);
  CHECK(cfg.variant == Variant::M);
  CHECK(cfg.kind == SystemKind::EpsDependent);
  CHECK(cfg.grid.dt == 5e-3);
  CHECK(cfg.grid.n_cells == 200);
  CHECK(cfg.grid.lambda == 0.5);
  CHECK(cfg.out == "traj.csv");
}

TEST_CASE("nu derives the stiffness ratio") {
  const RunConfig cfg = parse_config("nu = 0.25\n");
  CHECK(cfg.params.a == doctest::Approx(2.5));
  CHECK_THROWS_AS(parse_config("nu = 0.25\na = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("nu = 0.6\n"), ConfigError);
}

TEST_CASE("violations name the offending line") {
  try {
    parse_config("mu = 10\nlambda = 0.3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.kind == ConfigError::Kind::InvariantViolation);
    CHECK(e.line == 2);
  }
  try {
    parse_config("bogus_key = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.kind == ConfigError::Kind::UnknownKey);
    CHECK(e.line == 1);
  }
  try {
    parse_config("dt = fast\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.kind == ConfigError::Kind::TypeError);
    CHECK(e.line == 1);
  }
}

TEST_CASE("ds and n_cells are exclusive and must tile the interval") {
  CHECK(parse_config("ds = 0.0125\n").grid.n_cells == 80);
  CHECK_THROWS_AS(parse_config("ds = 0.013\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("ds = 0.01\nn_cells = 100\n"), ConfigError);
}

TEST_CASE("epsilon grid and refinement steps") {
  RunConfig cfg = parse_config("eps_min = 1e-4\neps_max = 1e-2\neps_count = 3\n");
  const auto grid = cfg.epsilon_grid();
  REQUIRE(grid.size() == 3);
  CHECK(grid[0] == doctest::Approx(1e-4));
  CHECK(grid[1] == doctest::Approx(1e-3));
  CHECK(grid[2] == doctest::Approx(1e-2));

  cfg = parse_config("eps_list = 1e-3, 5e-3 , 2e-2\n");
  REQUIRE(cfg.eps_list.size() == 3);
  CHECK(cfg.eps_list[1] == 5e-3);

  cfg = parse_config("refine_base = 0.1\nrefine_count = 3\n");
  const auto steps = cfg.refinement_steps();
  REQUIRE(steps.size() == 3);
  CHECK(steps[2] == doctest::Approx(0.025));

  // default sweep window: 21 log-spaced points on [1e-10, 1]
  const RunConfig defaults = parse_config("");
  const auto default_grid = defaults.epsilon_grid();
  REQUIRE(default_grid.size() == 21);
  CHECK(default_grid.front() == doctest::Approx(1e-10));
  CHECK(default_grid.back() == doctest::Approx(1.0));
}

TEST_CASE("trajectory CSV: schema line, shape and determinism") {
  RunConfig cfg = parse_config("n_cells = 8\ndt = 0.05\nt_end = 0.2\n");
  std::stringstream a, b;
  run_simulate_csv(cfg, a);
  run_simulate_csv(cfg, b);
  CHECK(a.str() == b.str());
  std::string first_line;
  std::getline(a, first_line);
  CHECK(first_line == "# schema=1");

  a.clear();
  a.seekg(0);
  const auto levels = read_trajectory_csv(a, 9);
  CHECK(levels.size() == 5);  // T/dt + 1 time blocks
  CHECK(levels.back().second.n_nodes() == 9);
}

TEST_CASE("eps = 0 and eps = 0.02 trajectories differ visibly at the tip") {
  RunConfig base = parse_config("n_cells = 50\ndt = 0.02\nt_end = 1.0\nkind = eps\n");
  std::stringstream zero, small;
  run_simulate_csv(base, zero);
  base.params.epsilon = 0.02;
  run_simulate_csv(base, small);
  const auto la = read_trajectory_csv(zero, 9);
  const auto lb = read_trajectory_csv(small, 9);
  REQUIRE(la.size() == lb.size());
  double max_tip = 0.0;
  for (std::size_t j = 0; j < la.size(); ++j) {
    const auto& sa = la[j].second;
    const auto& sb = lb[j].second;
    const int n = sa.n_nodes() - 1;
    const double dx = sa.node(n)[0] - sb.node(n)[0];
    const double dy = sa.node(n)[1] - sb.node(n)[1];
    max_tip = std::max(max_tip, std::hypot(dx, dy));
  }
  CHECK(max_tip > 1e-2);
}

TEST_CASE("sweep CSV shape for a short epsilon list") {
  RunConfig cfg = parse_config(
      "n_cells = 20\ndt = 0.05\nt_end = 0.2\neps_list = 1e-3\n");
  const SweepResult res = run_sweep_eps(cfg);
  REQUIRE(res.rows.size() == 1);
  std::stringstream os;
  write_sweep_csv(os, res);
  // single epsilon: no slope footer
  CHECK(os.str().find("# fit") == std::string::npos);
  CHECK(os.str().find("eps,c1_star,c1,c2_star,c2,phi1_norm") != std::string::npos);
}

TEST_CASE("energy command rows: rest state stays at zero energy") {
  RunConfig cfg = parse_config("n_cells = 10\ndt = 0.05\nt_end = 0.2\ngravity = off\n");
  const EnergyResult res = run_energy(cfg);
  REQUIRE(res.time.size() == 5);
  for (double w : res.total) CHECK(w == 0.0);
  CHECK(res.drift == 0.0);

  // with gravity the cantilever still starts at zero total energy
  RunConfig cg = parse_config("n_cells = 10\ndt = 0.05\nt_end = 0.1\n");
  CHECK(run_energy(cg).w0.front() == 0.0);
}

TEST_CASE("error_metric key selects the study observables") {
  CHECK(parse_config("").error_metric == ErrorMetric::State);
  CHECK(parse_config("error_metric = position\n").error_metric == ErrorMetric::Position);
  CHECK_THROWS_AS(parse_config("error_metric = forces\n"), ConfigError);
}
