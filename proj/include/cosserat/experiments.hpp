// experiments.hpp
//
// Orchestration of the studies behind the CLI commands: trajectory output,
// the epsilon sweep of the asymptotic-consistency quantities, spatial and
// temporal refinement studies, and the energy budget over a run. All results
// are written as CSV with a `# schema=1` header line and fit summaries in
// footer comments; reruns are byte-identical.

#ifndef COSSERAT_EXPERIMENTS_HPP
#define COSSERAT_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cosserat/collocation.hpp"
#include "cosserat/config.hpp"
#include "cosserat/core.hpp"
#include "cosserat/diagnostics.hpp"
#include "cosserat/planar.hpp"

namespace cosserat {

// Fit windows of the consistency sweep, reported in the CSV footer.
inline constexpr double kC1FitLo = 1e-6;
inline constexpr double kC1FitHi = 1e-2;
inline constexpr double kC2FitLo = 1e-4;
inline constexpr double kC2FitHi = 1e-2;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// --- threading ---------------------------------------------------------------

inline int thread_cap() {
  if (const char* env = std::getenv("RODSIM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs fn(0..n-1) on up to max_threads workers; rethrows the first failure.
inline void parallel_for(int n, int max_threads, const std::function<void(int)>& fn) {
  const int workers = std::min(std::max(1, max_threads), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// --- single runs -------------------------------------------------------------

struct FinalState {
  StateField state;
  std::optional<StateField> correction;
  double average_newton_iterations = 0.0;
};

inline FinalState run_final_state(const Parameters& params, Variant variant, SystemKind kind,
                                  const GridSpec& grid, double t_end,
                                  const SolverConfig& solver = {}) {
  const PlanarModel model(params, variant, kind);
  SimulationResult res = simulate(model, grid, t_end, solver);
  FinalState out{std::move(res.state), std::move(res.correction),
                 res.average_newton_iterations()};
  return out;
}

// --- trajectory CSV ------------------------------------------------------------

inline const char* kPlanarComponentNames[kPlanarUnknowns] = {
    "r1", "r2", "alpha", "v1", "v3", "n1", "n3", "omega", "kappa"};

inline void write_trajectory_header(std::ostream& os, bool with_correction) {
  os << "# schema=1\n";
  os << "t,s";
  for (const char* name : kPlanarComponentNames) os << ',' << name;
  if (with_correction)
    for (const char* name : kPlanarComponentNames) os << ",corr_" << name;
  os << '\n';
}

inline void write_trajectory_block(std::ostream& os, double t, const StateField& state,
                                   const StateField* correction) {
  const int n = state.n_nodes();
  const double ds = 1.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    os << format_double(t) << ',' << format_double(i * ds);
    const auto phi = state.node(i);
    for (int c = 0; c < state.unknowns(); ++c) os << ',' << format_double(phi[c]);
    if (correction) {
      const auto corr = correction->node(i);
      for (int c = 0; c < correction->unknowns(); ++c) os << ',' << format_double(corr[c]);
    }
    os << '\n';
  }
}

inline SimulationResult run_simulate_csv(const RunConfig& cfg, std::ostream& os,
                                         const SolverConfig& solver = {}) {
  const PlanarModel model(cfg.params, cfg.variant, cfg.kind);
  write_trajectory_header(os, cfg.kind == SystemKind::Correction);
  auto cb = [&os](int, double t, const StateField& state, const StateField* corr,
                  const StepStats&) { write_trajectory_block(os, t, state, corr); };
  return simulate(model, cfg.grid, cfg.t_end, solver, cb);
}

// Reads a trajectory written by run_simulate_csv back into (time, state)
// pairs; exact round-trip of the %.17g formatting.
inline std::vector<std::pair<double, StateField>> read_trajectory_csv(std::istream& is,
                                                                      int unknowns = 9) {
  std::vector<std::pair<double, StateField>> out;
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.compare(0, 2, "t,") == 0) continue;  // header
    std::stringstream ss(line);
    std::string item;
    std::vector<double> vals;
    while (std::getline(ss, item, ',')) vals.push_back(std::strtod(item.c_str(), nullptr));
    if (static_cast<int>(vals.size()) < 2 + unknowns)
      throw std::runtime_error("trajectory CSV: short row");
    rows.push_back(vals);
  }
  std::size_t i = 0;
  while (i < rows.size()) {
    const double t = rows[i][0];
    std::size_t j = i;
    while (j < rows.size() && rows[j][0] == t) ++j;
    StateField state(unknowns, static_cast<int>(j - i));
    for (std::size_t k = i; k < j; ++k)
      for (int c = 0; c < unknowns; ++c) state.node(static_cast<int>(k - i))[c] = rows[k][2 + c];
    out.emplace_back(t, std::move(state));
    i = j;
  }
  return out;
}

// --- epsilon sweep -------------------------------------------------------------

struct SweepResult {
  std::vector<ConsistencyReport> rows;
  double slope_c1_star = 0.0;
  double slope_c2_star = 0.0;
  int points_c1 = 0;
  int points_c2 = 0;
  double phi1_norm = 0.0;
};

inline SweepResult run_sweep_eps(const RunConfig& cfg, const SolverConfig& solver = {}) {
  const std::vector<double> eps_grid = cfg.epsilon_grid();
  const double ds = cfg.grid.ds();

  // One limit + correction run serves every epsilon.
  const FinalState base = run_final_state(cfg.params, cfg.variant, SystemKind::Correction,
                                          cfg.grid, cfg.t_end, solver);
  const StateField& phi0 = base.state;
  const StateField& phi1 = *base.correction;

  SweepResult result;
  result.rows.resize(eps_grid.size());
  result.phi1_norm = l2_norm(phi1, ds);
  parallel_for(static_cast<int>(eps_grid.size()), thread_cap(), [&](int i) {
    Parameters p = cfg.params;
    p.epsilon = eps_grid[i];
    const FinalState eps_run =
        run_final_state(p, cfg.variant, SystemKind::EpsDependent, cfg.grid, cfg.t_end, solver);
    result.rows[i] = asymptotic_consistency(eps_run.state, phi0, phi1, eps_grid[i], ds);
  });

  const double scale = std::max(1.0, l2_norm(phi0, ds));
  const double floor = 1e3 * 2.220446049250313e-16 * scale;
  std::vector<double> eps, c1s, c2s;
  for (const auto& r : result.rows) {
    eps.push_back(r.epsilon);
    c1s.push_back(r.norm_c1_star);
    c2s.push_back(r.norm_c2_star);
  }
  if (eps.size() >= 2) {
    try {
      result.slope_c1_star =
          fit_order_in_window(eps, c1s, kC1FitLo, kC1FitHi, floor, &result.points_c1);
    } catch (const std::exception&) {
      result.points_c1 = 0;
    }
    try {
      result.slope_c2_star =
          fit_order_in_window(eps, c2s, kC2FitLo, kC2FitHi, floor, &result.points_c2);
    } catch (const std::exception&) {
      result.points_c2 = 0;
    }
  }
  return result;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& res) {
  os << "# schema=1\n";
  os << "eps,c1_star,c1,c2_star,c2,phi1_norm\n";
  for (const auto& r : res.rows) {
    os << format_double(r.epsilon) << ',' << format_double(r.norm_c1_star) << ','
       << format_double(r.norm_c1) << ',' << format_double(r.norm_c2_star) << ','
       << format_double(r.norm_c2) << ',' << format_double(r.norm_phi1) << '\n';
  }
  if (res.points_c1 >= 2)
    os << "# fit c1_star: window=[" << format_double(kC1FitLo) << ',' << format_double(kC1FitHi)
       << "] slope=" << format_double(res.slope_c1_star) << " points=" << res.points_c1 << '\n';
  if (res.points_c2 >= 2)
    os << "# fit c2_star: window=[" << format_double(kC2FitLo) << ',' << format_double(kC2FitHi)
       << "] slope=" << format_double(res.slope_c2_star) << " points=" << res.points_c2 << '\n';
}

// --- refinement studies ----------------------------------------------------------

enum class RefineAxis { Space, Time };

struct ConvergeResult {
  std::vector<double> steps;
  std::vector<double> errors;
  double order = 0.0;
  int points = 0;
};

// Linear interpolation of a fine-grid field onto a coarse node set.
inline StateField interpolate_to_grid(const StateField& fine, int coarse_cells) {
  const int m = fine.unknowns();
  const int fine_cells = fine.n_nodes() - 1;
  StateField out(m, coarse_cells + 1);
  for (int i = 0; i <= coarse_cells; ++i) {
    const double s = static_cast<double>(i) / coarse_cells;
    double pos = s * fine_cells;
    int j = std::min(static_cast<int>(pos), fine_cells - 1);
    const double w = pos - j;
    out.node(i) = (1.0 - w) * fine.node(j) + w * fine.node(j + 1);
  }
  return out;
}

inline double relative_l2_difference(const StateField& approx, const StateField& reference) {
  const double ds = 1.0 / (approx.n_nodes() - 1);
  const double denom = l2_norm(reference, ds);
  if (denom == 0.0) throw std::runtime_error("relative error: reference vanishes");
  return l2_norm(approx - reference, ds) / denom;
}

// Relative L2 difference of a contiguous component group.
inline double relative_l2_difference(const StateField& approx, const StateField& reference,
                                     int comp0, int n_comps) {
  StateField da(n_comps, approx.n_nodes()), dr(n_comps, reference.n_nodes());
  for (int i = 0; i < approx.n_nodes(); ++i) {
    da.node(i) = approx.node(i).segment(comp0, n_comps);
    dr.node(i) = reference.node(i).segment(comp0, n_comps);
  }
  return relative_l2_difference(da, dr);
}

inline double study_error(const StateField& approx, const StateField& reference,
                          ErrorMetric metric) {
  if (metric == ErrorMetric::Position)
    return relative_l2_difference(approx, reference, 0, 3);  // r1, r2, alpha
  return relative_l2_difference(approx, reference);
}

// Field the refinement error is measured on: the primary state, or the
// correction state when the study targets the correction system.
inline const StateField& study_field(const FinalState& run, SystemKind kind) {
  return kind == SystemKind::Correction ? *run.correction : run.state;
}

inline ConvergeResult run_converge(const RunConfig& cfg, RefineAxis axis,
                                   const SolverConfig& solver = {}) {
  ConvergeResult result;
  result.steps = cfg.refinement_steps();
  result.errors.assign(result.steps.size(), 0.0);

  if (axis == RefineAxis::Space) {
    GridSpec ref_grid = cfg.grid;
    const double n_ref = 1.0 / cfg.ref_ds;
    ref_grid.n_cells = static_cast<int>(std::llround(n_ref));
    if (std::abs(ref_grid.n_cells * cfg.ref_ds - 1.0) > 1e-9)
      throw std::invalid_argument("converge-space: ref_ds must divide the unit interval");
    const FinalState ref =
        run_final_state(cfg.params, cfg.variant, cfg.kind, ref_grid, cfg.t_end, solver);
    const StateField& ref_field = study_field(ref, cfg.kind);
    parallel_for(static_cast<int>(result.steps.size()), thread_cap(), [&](int k) {
      GridSpec grid = cfg.grid;
      const double n_exact = 1.0 / result.steps[k];
      grid.n_cells = static_cast<int>(std::llround(n_exact));
      if (std::abs(grid.n_cells * result.steps[k] - 1.0) > 1e-9)
        throw std::invalid_argument("converge-space: step must divide the unit interval");
      const FinalState run =
          run_final_state(cfg.params, cfg.variant, cfg.kind, grid, cfg.t_end, solver);
      const StateField ref_coarse = interpolate_to_grid(ref_field, grid.n_cells);
      result.errors[k] = study_error(study_field(run, cfg.kind), ref_coarse, cfg.error_metric);
    });
  } else {
    GridSpec ref_grid = cfg.grid;
    ref_grid.dt = cfg.ref_dt;
    const FinalState ref =
        run_final_state(cfg.params, cfg.variant, cfg.kind, ref_grid, cfg.t_end, solver);
    const StateField& ref_field = study_field(ref, cfg.kind);
    parallel_for(static_cast<int>(result.steps.size()), thread_cap(), [&](int k) {
      GridSpec grid = cfg.grid;
      grid.dt = result.steps[k];
      const FinalState run =
          run_final_state(cfg.params, cfg.variant, cfg.kind, grid, cfg.t_end, solver);
      result.errors[k] = study_error(study_field(run, cfg.kind), ref_field, cfg.error_metric);
    });
  }

  const double floor = 1e3 * 2.220446049250313e-16;
  result.order = fit_order_in_window(result.steps, result.errors, 0.0,
                                     std::numeric_limits<double>::infinity(), floor,
                                     &result.points);
  return result;
}

inline void write_converge_csv(std::ostream& os, const ConvergeResult& res, RefineAxis axis) {
  os << "# schema=1\n";
  os << (axis == RefineAxis::Space ? "ds" : "dt") << ",rel_l2_error\n";
  for (std::size_t i = 0; i < res.steps.size(); ++i)
    os << format_double(res.steps[i]) << ',' << format_double(res.errors[i]) << '\n';
  os << "# fit order: slope=" << format_double(res.order) << " points=" << res.points << '\n';
}

// --- energy study ---------------------------------------------------------------

struct EnergyResult {
  std::vector<double> time;
  std::vector<double> w0;
  std::vector<double> w1;
  std::vector<double> total;
  double drift = 0.0;  // max |total(t) - total(0)|
};

inline EnergyResult run_energy(const RunConfig& cfg, const SolverConfig& solver = {}) {
  const PlanarModel model(cfg.params, cfg.variant, cfg.kind);
  EnergyResult res;
  const double e2 = cfg.params.epsilon * cfg.params.epsilon;
  auto cb = [&](int, double t, const StateField& state, const StateField* corr,
                const StepStats&) {
    const double w0 = energy_w0(state, cfg.params, cfg.params.gravity);
    const double w1 = corr ? energy_w1(state, *corr, cfg.params) : 0.0;
    res.time.push_back(t);
    res.w0.push_back(w0);
    res.w1.push_back(w1);
    res.total.push_back(corr ? w0 + e2 * w1 : w0);
  };
  simulate(model, cfg.grid, cfg.t_end, solver, cb);
  for (double e : res.total) res.drift = std::max(res.drift, std::abs(e - res.total.front()));
  return res;
}

inline void write_energy_csv(std::ostream& os, const EnergyResult& res) {
  os << "# schema=1\n";
  os << "t,w0,w1,total\n";
  for (std::size_t i = 0; i < res.time.size(); ++i)
    os << format_double(res.time[i]) << ',' << format_double(res.w0[i]) << ','
       << format_double(res.w1[i]) << ',' << format_double(res.total[i]) << '\n';
  os << "# drift max|E(t)-E(0)| = " << format_double(res.drift) << '\n';
}

}  // namespace cosserat

#endif  // COSSERAT_EXPERIMENTS_HPP
