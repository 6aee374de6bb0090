// newton.hpp
//
// Newton iteration with Armijo backtracking over caller-supplied residual and
// linear-solve callbacks, plus a central finite-difference Jacobian used as
// the verification oracle for the analytic derivatives.

#ifndef COSSERAT_NEWTON_HPP
#define COSSERAT_NEWTON_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "cosserat/core.hpp"

namespace cosserat {

struct SolverConfig {
  double tol = 1e-10;          // residual inf-norm, relative to 1 + initial norm
  int max_iter = 25;
  double armijo_c = 1e-4;      // sufficient-decrease constant on |F|^2
  double backtrack = 0.5;
  double min_step = 9.313225746154785e-10;  // 2^-30
  bool debug_checks = false;   // directional FD check of the Jacobian per iterate
  bool use_dense_fallback = false;  // dense linear solves for small grids

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    if (!(armijo_c > 0.0 && armijo_c < 1.0))
      throw std::invalid_argument("SolverConfig: armijo_c must lie in (0,1)");
    if (!(backtrack > 0.0 && backtrack < 1.0))
      throw std::invalid_argument("SolverConfig: backtrack must lie in (0,1)");
    if (!(min_step > 0.0)) throw std::invalid_argument("SolverConfig: min_step must be > 0");
  }
};

struct StepStats {
  int newton_iterations = 0;
  double final_residual_norm = 0.0;
  int line_search_backtracks = 0;
  bool forced_full_step = false;  // Armijo exhausted min_step, full step taken
};

struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(int iters, double resid, int time_idx = -1)
      : std::runtime_error("Newton did not converge after " + std::to_string(iters) +
                           " iterations (residual " + std::to_string(resid) +
                           (time_idx >= 0 ? ", time step " + std::to_string(time_idx) : "") + ")"),
        iterations(iters), residual(resid), time_index(time_idx) {}
  int iterations;
  double residual;
  int time_index;
};

using IterateCallback = std::function<void(int iter, const VecX& x, double residual_norm)>;

// Solves F(x) = 0. `solve_step(x, Fx)` must return d with J(x) d = -Fx.
// Accepted steps satisfy |F(x + t d)|^2 <= (1 - 2 c t) |F(x)|^2; if the
// backtracking floor is reached the full step is taken and flagged.
template <class ResidualFn, class StepSolveFn>
std::pair<VecX, StepStats> newton_armijo(ResidualFn&& residual, StepSolveFn&& solve_step,
                                         VecX x, const SolverConfig& cfg,
                                         const IterateCallback& on_iterate = {}) {
  cfg.validate();
  StepStats stats;
  VecX fx = residual(x);
  const double tol_eff = cfg.tol * (1.0 + fx.template lpNorm<Eigen::Infinity>());

  for (int it = 0; it <= cfg.max_iter; ++it) {
    const double fnorm = fx.template lpNorm<Eigen::Infinity>();
    if (on_iterate) on_iterate(it, x, fnorm);
    if (fnorm <= tol_eff) {
      stats.newton_iterations = it;
      stats.final_residual_norm = fnorm;
      return {std::move(x), stats};
    }
    if (it == cfg.max_iter) break;

    const VecX d = solve_step(x, fx);
    const double merit0 = fx.squaredNorm();
    double t = 1.0;
    for (;;) {
      VecX xt = x + t * d;
      VecX ft = residual(xt);
      const double merit = ft.squaredNorm();
      if (merit <= (1.0 - 2.0 * cfg.armijo_c * t) * merit0) {
        x = std::move(xt);
        fx = std::move(ft);
        break;
      }
      t *= cfg.backtrack;
      ++stats.line_search_backtracks;
      if (t < cfg.min_step) {
        x += d;
        fx = residual(x);
        stats.forced_full_step = true;
        break;
      }
    }
  }
  throw NonConvergenceError(cfg.max_iter, fx.template lpNorm<Eigen::Infinity>());
}

// Convenience overload for a dense Jacobian function.
template <class ResidualFn, class JacobianFn>
std::pair<VecX, StepStats> newton_armijo_dense(ResidualFn&& residual, JacobianFn&& jacobian,
                                               VecX x0, const SolverConfig& cfg,
                                               const IterateCallback& on_iterate = {}) {
  auto solve = [&](const VecX& x, const VecX& fx) -> VecX {
    MatX j = jacobian(x);
    return Eigen::PartialPivLU<MatX>(std::move(j)).solve(VecX(-fx));
  };
  return newton_armijo(std::forward<ResidualFn>(residual), solve, std::move(x0), cfg, on_iterate);
}

// Central finite differences, column k stepped by scale*(1 + |x_k|).
template <class ResidualFn>
MatX fd_jacobian(ResidualFn&& residual, const VecX& x, double scale = 1e-6) {
  const VecX f0 = residual(x);
  MatX j(f0.size(), x.size());
  VecX xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = scale * (1.0 + std::abs(x[k]));
    xp[k] = x[k] + h;
    const VecX fp = residual(xp);
    xp[k] = x[k] - h;
    const VecX fm = residual(xp);
    xp[k] = x[k];
    j.col(k) = (fp - fm) / (2.0 * h);
  }
  return j;
}

}  // namespace cosserat

#endif  // COSSERAT_NEWTON_HPP
