// Test-only transcription oracle for the planar rod system: each residual row
// is written out directly from the displayed equations (curve rows
// premultiplied by D(alpha)), independent of the matrix/source split used by
// the library.

#ifndef TESTS_PLANAR_ORACLE_HPP
#define TESTS_PLANAR_ORACLE_HPP

#include <cmath>
#include <random>

#include "cosserat/planar.hpp"

namespace oracle {

using cosserat::Parameters;
using cosserat::SystemKind;
using cosserat::Variant;
using cosserat::Vec9;
namespace ix = cosserat::planar_idx;

inline Vec9 planar_residual(SystemKind kind, Variant var, const Parameters& p, const Vec9& phi,
                            const Vec9& dt, const Vec9& ds) {
  const double e2 = (kind == SystemKind::EpsDependent) ? p.epsilon * p.epsilon : 0.0;
  const double al = phi[ix::alpha], v1 = phi[ix::v1], v3 = phi[ix::v3];
  const double n1 = phi[ix::n1], n3 = phi[ix::n3], om = phi[ix::omega], ka = phi[ix::kappa];
  const double sa = std::sin(al), ca = std::cos(al);
  const double mu2 = p.mu * p.mu, a = p.a;
  const double f2 = p.gravity ? -1.0 / (p.froude * p.froude) : 0.0;

  // kinematic: d_t r - D(al) v = 0,  d_t alpha - omega = 0
  const double kin1 = dt[ix::r1] - (-sa * v1 + ca * v3);
  const double kin2 = dt[ix::r2] - (ca * v1 + sa * v3);
  const double kin3 = dt[ix::alpha] - om;
  // geometric: d_s r - D(al)(e2 + eps^2 mu^2 a P_{1/a} n) = 0, d_s alpha - kappa = 0
  const double gx = e2 * mu2 * a * n1;
  const double gy = 1.0 + e2 * mu2 * n3;
  const double geo1 = ds[ix::r1] - (-sa * gx + ca * gy);
  const double geo2 = ds[ix::r2] - (ca * gx + sa * gy);
  const double geo3 = ds[ix::alpha] - ka;
  // compatibility: eps^2 mu^2 a P_{1/a} d_t n - d_s v + ka v_perp + om e1
  //                - eps^2 mu^2 om P_a n_perp = 0,  d_t kappa - d_s omega = 0
  const double comp1 =
      e2 * mu2 * a * dt[ix::n1] - ds[ix::v1] + ka * (-v3) + om - e2 * mu2 * om * (-n3);
  const double comp2 = e2 * mu2 * dt[ix::n3] - ds[ix::v3] + ka * v1 - e2 * mu2 * om * (a * n1);
  const double comp3 = dt[ix::kappa] - ds[ix::omega];
  // balances: d_t v - d_s n + ka n_perp - om v_perp - D(al) f = 0
  //           eps^2 d_t omega - mu^{-2} d_s kappa - n1 - eps^2 mu^2 (1-a) n1 n3 = 0
  const double bal1 = dt[ix::v1] - ds[ix::n1] + ka * (-n3) - om * (-v3) - ca * f2;
  const double bal2 = dt[ix::v3] - ds[ix::n3] + ka * n1 - om * v1 - sa * f2;
  const double bal3 =
      e2 * dt[ix::omega] - ds[ix::kappa] / mu2 - n1 - e2 * mu2 * (1.0 - a) * n1 * n3;

  Vec9 out;
  switch (var) {
    case Variant::M: out << kin1, kin2, kin3, geo1, geo2, geo3, bal1, bal2, bal3; break;
    case Variant::T: out << kin1, kin2, kin3, comp1, comp2, comp3, bal1, bal2, bal3; break;
    case Variant::S: out << geo1, geo2, geo3, comp1, comp2, comp3, bal1, bal2, bal3; break;
  }
  return out;
}

inline Vec9 random_state(std::mt19937& rng, double span = 1.5) {
  std::uniform_real_distribution<double> u(-span, span);
  Vec9 phi;
  for (int i = 0; i < 9; ++i) phi[i] = u(rng);
  return phi;
}

}  // namespace oracle

#endif  // TESTS_PLANAR_ORACLE_HPP
