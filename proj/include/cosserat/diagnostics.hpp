// diagnostics.hpp
//
// Energies of the limit system and its first-order correction, least-squares
// convergence-order estimation, and the asymptotic-consistency quantities
//   c1* = phi_eps - phi0           ~ eps^2
//   c2* = phi_eps - phi0 - eps^2 phi1  ~ eps^4
// with their rescaled magnitudes c_i = c_i* / eps^{2i}.

#ifndef COSSERAT_DIAGNOSTICS_HPP
#define COSSERAT_DIAGNOSTICS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cosserat/core.hpp"
#include "cosserat/planar.hpp"
#include "cosserat/spatial.hpp"

namespace cosserat {

// Leading-order energy density 1/2 v^2 + kappa^2/(2 mu^2) + V(r), V = r2/Fr^2,
// integrated over [0,1] with the trapezoid rule.
inline double energy_w0(const StateField& state, const Parameters& p, bool gravity_on) {
  namespace ix = planar_idx;
  if (state.unknowns() != kPlanarUnknowns)
    throw std::invalid_argument("energy_w0: planar field expected");
  const int n = state.n_nodes();
  const double ds = 1.0 / (n - 1);
  const double mu2 = p.mu * p.mu;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto phi = state.node(i);
    double w = 0.5 * (phi[ix::v1] * phi[ix::v1] + phi[ix::v3] * phi[ix::v3]) +
               phi[ix::kappa] * phi[ix::kappa] / (2.0 * mu2);
    if (gravity_on) w += phi[ix::r2] / (p.froude * p.froude);
    acc += ((i == 0 || i == n - 1) ? 0.5 : 1.0) * w;
  }
  return acc * ds;
}

// Energy contribution of the first-order correction,
//   w1 = v0.v1 + kappa0 P_{2/a} kappa1 / mu^2 + 1/2 omega0 P_2 omega0
//        + mu^2 a / 2 n0 P_{1/a} n0 + V(r1),
// reduced to the in-plane components (the planar omega and kappa sit in the
// middle slot of P_2 and P_{2/a}, whose diagonal entry is 1).
inline double energy_w1(const StateField& limit_state, const StateField& corr_state,
                        const Parameters& p) {
  namespace ix = planar_idx;
  if (!limit_state.same_layout(corr_state))
    throw std::invalid_argument("energy_w1: fields on different grids");
  if (limit_state.unknowns() != kPlanarUnknowns)
    throw std::invalid_argument("energy_w1: planar fields expected");
  const int n = limit_state.n_nodes();
  const double ds = 1.0 / (n - 1);
  const double mu2 = p.mu * p.mu;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto p0 = limit_state.node(i);
    const auto p1 = corr_state.node(i);
    double w = p0[ix::v1] * p1[ix::v1] + p0[ix::v3] * p1[ix::v3] +
               p0[ix::kappa] * p1[ix::kappa] / mu2 +
               0.5 * p0[ix::omega] * p0[ix::omega] +
               0.5 * mu2 * p.a * (p0[ix::n1] * p0[ix::n1] + p0[ix::n3] * p0[ix::n3] / p.a);
    if (p.gravity) w += p1[ix::r2] / (p.froude * p.froude);
    acc += ((i == 0 || i == n - 1) ? 0.5 : 1.0) * w;
  }
  return acc * ds;
}

// Leading-order energy of a spatial (m = 19) field; kappa enters through the
// quadratic form with P_{2/a}.
inline double energy_w0_spatial(const StateField& state, const Parameters& p, bool gravity_on) {
  namespace ix = spatial_idx;
  if (state.unknowns() != kSpatialUnknowns)
    throw std::invalid_argument("energy_w0_spatial: spatial field expected");
  const int n = state.n_nodes();
  const double ds = 1.0 / (n - 1);
  const double mu2 = p.mu * p.mu;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto x = state.node(i);
    const Vec3 v = x.segment<3>(ix::v);
    const Vec3 kap = x.segment<3>(ix::kappa);
    double w = 0.5 * v.squaredNorm() +
               (kap[0] * kap[0] + kap[1] * kap[1] + (2.0 / p.a) * kap[2] * kap[2]) / (2.0 * mu2);
    if (gravity_on) w += x[ix::r + 1] / (p.froude * p.froude);
    acc += ((i == 0 || i == n - 1) ? 0.5 : 1.0) * w;
  }
  return acc * ds;
}

// Least-squares slope of log(error) against log(step).
inline double convergence_order(const std::vector<double>& steps,
                                const std::vector<double>& errors) {
  if (steps.size() != errors.size() || steps.size() < 2)
    throw std::invalid_argument("convergence_order: need at least two matching pairs");
  const int n = static_cast<int>(steps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    if (!(steps[i] > 0.0) || !(errors[i] > 0.0))
      throw std::invalid_argument("convergence_order: inputs must be positive");
    const double x = std::log(steps[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("convergence_order: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

// Slope restricted to a step/epsilon window, dropping points that sit at the
// round-off floor of the measurement.
inline double fit_order_in_window(const std::vector<double>& steps,
                                  const std::vector<double>& errors, double lo, double hi,
                                  double noise_floor = 1e3 * 2.220446049250313e-16,
                                  int* points_used = nullptr) {
  std::vector<double> s, e;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] >= lo * (1.0 - 1e-9) && steps[i] <= hi * (1.0 + 1e-9) &&
        errors[i] > noise_floor)
      s.push_back(steps[i]), e.push_back(errors[i]);
  }
  if (points_used) *points_used = static_cast<int>(s.size());
  return convergence_order(s, e);
}

struct ConsistencyReport {
  double epsilon = 0.0;
  double norm_c1_star = 0.0;
  double norm_c2_star = 0.0;
  double norm_c1 = 0.0;
  double norm_c2 = 0.0;
  double norm_phi1 = 0.0;
};

// L2(0,1) sizes of the consistency defects of a solution triple at one time.
inline ConsistencyReport asymptotic_consistency(const StateField& phi_eps,
                                                const StateField& phi0, const StateField& phi1,
                                                double epsilon, double ds) {
  if (!phi_eps.same_layout(phi0) || !phi_eps.same_layout(phi1))
    throw std::invalid_argument("asymptotic_consistency: fields on different grids");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("asymptotic_consistency: epsilon must be > 0");
  const double e2 = epsilon * epsilon;
  ConsistencyReport rep;
  rep.epsilon = epsilon;
  rep.norm_c1_star = l2_norm(phi_eps - phi0, ds);
  rep.norm_c2_star = l2_norm(phi_eps - phi0 - e2 * phi1, ds);
  rep.norm_c1 = rep.norm_c1_star / e2;
  rep.norm_c2 = rep.norm_c2_star / (e2 * e2);
  rep.norm_phi1 = l2_norm(phi1, ds);
  return rep;
}

}  // namespace cosserat

#endif  // COSSERAT_DIAGNOSTICS_HPP
