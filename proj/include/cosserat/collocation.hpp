// collocation.hpp
//
// Space-time collocation of the rod systems: the residual is enforced at the
// cell/time midpoints (s_{i+1/2}, t^{j+lambda}) with four-point stencils, the
// boundary rows close the system, and each time step is a Newton solve on a
// block band matrix. The first-order correction advances by a single linear
// solve with the limit system's Jacobian.

#ifndef COSSERAT_COLLOCATION_HPP
#define COSSERAT_COLLOCATION_HPP

#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "cosserat/banded.hpp"
#include "cosserat/core.hpp"
#include "cosserat/newton.hpp"
#include "cosserat/planar.hpp"

namespace cosserat {

// Four-point stencil values at the collocation point of one cell:
//   mid = lam/2 (phi_{i+1}' + phi_i') + (1-lam)/2 (phi_{i+1} + phi_i)
//   dt  = (phi_{i+1}' + phi_i' - phi_{i+1} - phi_i) / (2 dt)
//   ds  = lam/ds (phi_{i+1}' - phi_i') + (1-lam)/ds (phi_{i+1} - phi_i)
// where primes denote the new time level.
template <int M>
StencilEvalT<M> stencil_eval(const Eigen::Matrix<double, M, 1>& new_left,
                             const Eigen::Matrix<double, M, 1>& new_right,
                             const Eigen::Matrix<double, M, 1>& old_left,
                             const Eigen::Matrix<double, M, 1>& old_right,
                             const GridSpec& grid) {
  const double lam = grid.lambda;
  StencilEvalT<M> out;
  out.mid = 0.5 * lam * (new_right + new_left) + 0.5 * (1.0 - lam) * (old_right + old_left);
  out.dt = (new_right + new_left - old_right - old_left) / (2.0 * grid.dt);
  out.ds = (lam * (new_right - new_left) + (1.0 - lam) * (old_right - old_left)) / grid.ds();
  return out;
}

template <class Model>
class CollocationEngine {
 public:
  static constexpr int m = Model::m;
  static constexpr int kLeft = Model::left_rows;
  static constexpr int kRight = Model::right_rows;
  using VecM = Eigen::Matrix<double, m, 1>;
  using Stencil = StencilEvalT<m>;

  CollocationEngine(Model model, const GridSpec& grid) : model_(std::move(model)), grid_(grid) {
    grid_.validate();
    static_assert(kLeft + kRight == m, "boundary rows must close the system");
  }

  const Model& model() const { return model_; }
  const GridSpec& grid() const { return grid_; }
  int dim() const { return m * (grid_.n_cells + 1); }

  // Row layout: kLeft left-boundary rows, then m rows per cell, then kRight
  // right-boundary rows. Columns are node-major. All entries stay within the
  // band (lower at most 2m-1, upper 2m-1-kLeft).
  int band_lower() const {
    return model_.right_couples_inner() ? (kLeft + m + kRight - 1) : (kLeft + m - 1);
  }
  int band_upper() const { return 2 * m - 1 - kLeft; }

  VecX assemble_residual(const StateField& phi_old, const StateField& phi_new,
                         const StateField* bg_old = nullptr,
                         const StateField* bg_new = nullptr) const {
    check_fields(phi_old, phi_new, bg_old, bg_new);
    const int n = grid_.n_cells;
    VecX out(dim());
    out.head(kLeft) = left_eval(phi_old, phi_new, bg_old, bg_new).resid;
    for (int i = 0; i < n; ++i) {
      const Stencil self = cell_stencil(phi_old, phi_new, i);
      if (model_.needs_background()) {
        const Stencil bg = cell_stencil(*bg_old, *bg_new, i);
        out.segment(kLeft + m * i, m) = model_.point_residual(self, &bg);
      } else {
        out.segment(kLeft + m * i, m) = model_.point_residual(self, nullptr);
      }
    }
    out.tail(kRight) = right_eval(phi_old, phi_new, bg_old, bg_new).resid;
    return out;
  }

  BandedMatrix assemble_jacobian(const StateField& phi_old, const StateField& phi_new,
                                 const StateField* bg_old = nullptr,
                                 const StateField* bg_new = nullptr) const {
    check_fields(phi_old, phi_new, bg_old, bg_new);
    const int n = grid_.n_cells;
    BandedMatrix jac(dim(), band_lower(), band_upper());
    const auto bl = left_eval(phi_old, phi_new, bg_old, bg_new);
    for (int r = 0; r < kLeft; ++r)
      for (int c = 0; c < m; ++c)
        if (bl.jac(r, c) != 0.0) jac.at(r, c) = bl.jac(r, c);

    const double lam = grid_.lambda;
    const double wt = 1.0 / (2.0 * grid_.dt);
    const double ws = lam / grid_.ds();
    for (int i = 0; i < n; ++i) {
      const Stencil self = cell_stencil(phi_old, phi_new, i);
      typename Model::SourceEval src;
      if (model_.needs_background()) {
        const Stencil bg = cell_stencil(*bg_old, *bg_new, i);
        src = model_.source_eval(self, &bg);
      } else {
        src = model_.source_eval(self, nullptr);
      }
      const Eigen::Matrix<double, m, m> common = wt * model_.matrix_a() + 0.5 * lam * src.jac;
      const Eigen::Matrix<double, m, m> left_block = common - ws * model_.matrix_b();
      const Eigen::Matrix<double, m, m> right_block = common + ws * model_.matrix_b();
      const int row0 = kLeft + m * i;
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
          if (left_block(r, c) != 0.0) jac.at(row0 + r, m * i + c) = left_block(r, c);
          if (right_block(r, c) != 0.0) jac.at(row0 + r, m * (i + 1) + c) = right_block(r, c);
        }
    }

    const auto br = right_eval(phi_old, phi_new, bg_old, bg_new);
    const int row0 = kLeft + m * n;
    for (int r = 0; r < kRight; ++r)
      for (int c = 0; c < m; ++c) {
        if (br.jac_inner(r, c) != 0.0) jac.at(row0 + r, m * (n - 1) + c) = br.jac_inner(r, c);
        if (br.jac_last(r, c) != 0.0) jac.at(row0 + r, m * n + c) = br.jac_last(r, c);
      }
    return jac;
  }

  // One nonlinear time step. Newton starts from `predictor` when given (the
  // driver passes the linear extrapolation of the two previous levels, which
  // keeps the iteration count at the expected 2-3 for every variant), and
  // from the previous level otherwise; the converged state is independent of
  // that choice.
  std::pair<StateField, StepStats> step(const StateField& phi_old, const SolverConfig& cfg,
                                        const StateField* bg_old = nullptr,
                                        const StateField* bg_new = nullptr,
                                        const StateField* predictor = nullptr) const {
    auto residual = [&](const VecX& x) {
      StateField cand = phi_old;
      cand.data() = x;
      return assemble_residual(phi_old, cand, bg_old, bg_new);
    };
    auto solve_step = [&](const VecX& x, const VecX& fx) {
      StateField cand = phi_old;
      cand.data() = x;
      if (cfg.debug_checks) debug_directional_check(phi_old, cand, fx, bg_old, bg_new);
      if (cfg.use_dense_fallback && grid_.n_cells <= 64) {
        const MatX dense = assemble_jacobian(phi_old, cand, bg_old, bg_new).dense();
        return dense_lu_solve(dense, -fx);
      }
      const BandedMatrix jac = assemble_jacobian(phi_old, cand, bg_old, bg_new);
      return BandedLu(jac).solve(-fx);
    };
    const VecX start = predictor ? predictor->data() : phi_old.data();
    auto [x, stats] = newton_armijo(residual, solve_step, start, cfg);
    StateField out = phi_old;
    out.data() = std::move(x);
    model_.normalize_state(out);
    return {std::move(out), stats};
  }

 private:
  typename Model::BoundaryLeft left_eval(const StateField& phi_old, const StateField& phi_new,
                                         const StateField* bg_old,
                                         const StateField* bg_new) const {
    const VecM new0 = phi_new.node(0);
    const VecM old0 = phi_old.node(0);
    VecM bgn, bgo;
    const VecM* p_bgn = nullptr;
    const VecM* p_bgo = nullptr;
    if (bg_new) {
      bgn = bg_new->node(0);
      p_bgn = &bgn;
    }
    if (bg_old) {
      bgo = bg_old->node(0);
      p_bgo = &bgo;
    }
    return model_.boundary_left(new0, old0, p_bgn, p_bgo, grid_);
  }

  typename Model::BoundaryRight right_eval(const StateField& phi_old, const StateField& phi_new,
                                           const StateField* bg_old,
                                           const StateField* bg_new) const {
    const int n = grid_.n_cells;
    const VecM new_inner = phi_new.node(n - 1);
    const VecM new_last = phi_new.node(n);
    const VecM old_inner = phi_old.node(n - 1);
    const VecM old_last = phi_old.node(n);
    VecM bni, bnl, boi, bol;
    const VecM *p_bni = nullptr, *p_bnl = nullptr, *p_boi = nullptr, *p_bol = nullptr;
    if (bg_new) {
      bni = bg_new->node(n - 1);
      bnl = bg_new->node(n);
      p_bni = &bni;
      p_bnl = &bnl;
    }
    if (bg_old) {
      boi = bg_old->node(n - 1);
      bol = bg_old->node(n);
      p_boi = &boi;
      p_bol = &bol;
    }
    return model_.boundary_right(new_inner, new_last, old_inner, old_last, p_bni, p_bnl, p_boi,
                                 p_bol, grid_);
  }

  Stencil cell_stencil(const StateField& old_f, const StateField& new_f, int i) const {
    const VecM nl = new_f.node(i);
    const VecM nr = new_f.node(i + 1);
    const VecM ol = old_f.node(i);
    const VecM orr = old_f.node(i + 1);
    return stencil_eval<m>(nl, nr, ol, orr, grid_);
  }

  void check_fields(const StateField& a, const StateField& b, const StateField* bg_old,
                    const StateField* bg_new) const {
    if (a.unknowns() != m || a.n_nodes() != grid_.n_cells + 1 || !a.same_layout(b))
      throw std::invalid_argument("CollocationEngine: field/grid mismatch");
    if (model_.needs_background() && (!bg_old || !bg_new))
      throw std::invalid_argument("CollocationEngine: correction system needs background fields");
    if (bg_old && !bg_old->same_layout(a))
      throw std::invalid_argument("CollocationEngine: background layout mismatch");
  }

  // Spot check of the assembled Jacobian against a directional finite
  // difference, active when debug_checks is on.
  void debug_directional_check(const StateField& phi_old, const StateField& phi_new,
                               const VecX& fx, const StateField* bg_old,
                               const StateField* bg_new) const {
    const BandedMatrix jac = assemble_jacobian(phi_old, phi_new, bg_old, bg_new);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VecX dir(dim());
    for (int i = 0; i < dim(); ++i) dir[i] = u(rng);
    dir /= dir.norm();
    const double h = 1e-6;
    StateField plus = phi_new, minus = phi_new;
    plus.data() += h * dir;
    minus.data() -= h * dir;
    const VecX fd = (assemble_residual(phi_old, plus, bg_old, bg_new) -
                     assemble_residual(phi_old, minus, bg_old, bg_new)) /
                    (2.0 * h);
    const VecX jv = jac.multiply(dir);
    const double err = (fd - jv).lpNorm<Eigen::Infinity>();
    const double scale = 1.0 + jv.lpNorm<Eigen::Infinity>() + fx.lpNorm<Eigen::Infinity>();
    if (err > 1e-4 * scale)
      throw std::logic_error("CollocationEngine: Jacobian/residual mismatch in debug check");
  }

  Model model_;
  GridSpec grid_;
};

// Advances the first-order correction by one time level: a single linear
// solve with the limit system's Jacobian at the converged background.
template <class Model>
StateField correction_step(const CollocationEngine<Model>& corr_engine,
                           const StateField& limit_old, const StateField& limit_new,
                           const StateField& corr_old, const SolverConfig& cfg) {
  auto [corr_new, stats] = corr_engine.step(corr_old, cfg, &limit_old, &limit_new);
  (void)stats;  // linear system: converges in one iteration
  return corr_new;
}

struct SimulationResult {
  StateField state;                      // final primary state
  std::optional<StateField> correction;  // final correction state, if run
  long long total_newton_iterations = 0;
  int steps = 0;
  double average_newton_iterations() const {
    return steps > 0 ? static_cast<double>(total_newton_iterations) / steps : 0.0;
  }
};

// callback(level_index, time, primary_state, correction_state_or_null, stats)
using SimulateCallback =
    std::function<void(int, double, const StateField&, const StateField*, const StepStats&)>;

inline int step_count_for(double t_end, double dt) {
  const double steps = t_end / dt;
  const int n = static_cast<int>(std::llround(steps));
  if (t_end < 0.0 || std::abs(steps - n) > 1e-8 * std::max(1.0, steps))
    throw std::invalid_argument("simulate: t_end must be a multiple of dt");
  return n;
}

// Full trajectory of the planar cantilever. For the correction system the
// limit problem is integrated in lockstep and feeds every linear correction
// solve; the limit state is reported as the primary one.
inline SimulationResult simulate(const PlanarModel& model, const GridSpec& grid, double t_end,
                                 const SolverConfig& cfg,
                                 const SimulateCallback& callback = {}) {
  const int n_steps = step_count_for(t_end, grid.dt);
  SimulationResult result;
  result.steps = n_steps;
  if (model.kind() == SystemKind::Correction) {
    const PlanarModel limit_model(model.params(), model.variant(), SystemKind::Limit);
    CollocationEngine<PlanarModel> limit_engine(limit_model, grid);
    CollocationEngine<PlanarModel> corr_engine(model, grid);
    StateField phi0 = limit_model.initial_state(grid);
    StateField phi0_prev = phi0;
    StateField phi1 = model.initial_state(grid);
    StepStats zero{};
    if (callback) callback(0, 0.0, phi0, &phi1, zero);
    for (int j = 0; j < n_steps; ++j) {
      try {
        StateField guess = phi0;
        if (j > 0) guess.data() = 2.0 * phi0.data() - phi0_prev.data();
        auto [phi0_new, stats] = limit_engine.step(phi0, cfg, nullptr, nullptr, &guess);
        phi1 = correction_step(corr_engine, phi0, phi0_new, phi1, cfg);
        phi0_prev = std::move(phi0);
        phi0 = std::move(phi0_new);
        result.total_newton_iterations += stats.newton_iterations;
        if (callback) callback(j + 1, (j + 1) * grid.dt, phi0, &phi1, stats);
      } catch (const NonConvergenceError& e) {
        throw NonConvergenceError(e.iterations, e.residual, j);
      }
    }
    result.state = phi0;
    result.correction = phi1;
    return result;
  }

  CollocationEngine<PlanarModel> engine(model, grid);
  StateField phi = model.initial_state(grid);
  StateField phi_prev = phi;
  StepStats zero{};
  if (callback) callback(0, 0.0, phi, nullptr, zero);
  for (int j = 0; j < n_steps; ++j) {
    try {
      StateField guess = phi;
      if (j > 0) guess.data() = 2.0 * phi.data() - phi_prev.data();
      auto [phi_new, stats] = engine.step(phi, cfg, nullptr, nullptr, &guess);
      phi_prev = std::move(phi);
      phi = std::move(phi_new);
      result.total_newton_iterations += stats.newton_iterations;
      if (callback) callback(j + 1, (j + 1) * grid.dt, phi, nullptr, stats);
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError(e.iterations, e.residual, j);
    }
  }
  result.state = phi;
  return result;
}

}  // namespace cosserat

#endif  // COSSERAT_COLLOCATION_HPP
