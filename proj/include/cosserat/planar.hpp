// planar.hpp
//
// Planar cantilever rod model (m = 9 unknowns per node) in the abstract form
//
//     A_eps * dPhi/dt + B_eps * dPhi/ds + c_eps(Phi) = 0
//
// with constant matrices A_eps = A0 + eps^2 A1, B_eps = B0 + eps^2 B1 and a
// nonlinear source c_eps = c0 + eps^2 c1. The kinematic and geometric curve
// rows are premultiplied by D(alpha) (an involution in 2d), which moves all
// state dependence into the source and keeps A and B constant.
//
// Unknown ordering per node: (r1, r2, alpha, v1, v3, n1, n3, omega, kappa).
// Row ordering per variant:
//   (M) kin-r (2), kin-alpha, geo-r (2), geo-alpha, bal-v (2), bal-omega
//   (T) kin-r (2), kin-alpha, comp-n (2), comp-kappa, bal-v (2), bal-omega
//   (S) geo-r (2), geo-alpha, comp-n (2), comp-kappa, bal-v (2), bal-omega

#ifndef COSSERAT_PLANAR_HPP
#define COSSERAT_PLANAR_HPP

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "cosserat/core.hpp"

namespace cosserat {

inline constexpr int kPlanarUnknowns = 9;

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

namespace planar_idx {
inline constexpr int r1 = 0;
inline constexpr int r2 = 1;
inline constexpr int alpha = 2;
inline constexpr int v1 = 3;
inline constexpr int v3 = 4;
inline constexpr int n1 = 5;
inline constexpr int n3 = 6;
inline constexpr int omega = 7;
inline constexpr int kappa = 8;
}  // namespace planar_idx

enum class EquationId {
  KinCurve1, KinCurve2, KinAngle,
  GeoCurve1, GeoCurve2, GeoAngle,
  CompForce1, CompForce2, CompCurvature,
  BalLinear1, BalLinear2, BalAngular,
};

// The three row blocks of a variant: rows 0-2, 3-5, 6-8.
enum class RowBlock { Kin, Geo, Comp, Bal };

inline std::array<RowBlock, 3> row_layout(Variant v) {
  switch (v) {
    case Variant::M: return {RowBlock::Kin, RowBlock::Geo, RowBlock::Bal};
    case Variant::T: return {RowBlock::Kin, RowBlock::Comp, RowBlock::Bal};
    case Variant::S: return {RowBlock::Geo, RowBlock::Comp, RowBlock::Bal};
  }
  throw std::logic_error("row_layout: bad variant");
}

inline std::array<EquationId, 9> equations_planar(Variant v) {
  std::array<EquationId, 9> out{};
  int r = 0;
  for (RowBlock b : row_layout(v)) {
    switch (b) {
      case RowBlock::Kin:
        out[r++] = EquationId::KinCurve1;
        out[r++] = EquationId::KinCurve2;
        out[r++] = EquationId::KinAngle;
        break;
      case RowBlock::Geo:
        out[r++] = EquationId::GeoCurve1;
        out[r++] = EquationId::GeoCurve2;
        out[r++] = EquationId::GeoAngle;
        break;
      case RowBlock::Comp:
        out[r++] = EquationId::CompForce1;
        out[r++] = EquationId::CompForce2;
        out[r++] = EquationId::CompCurvature;
        break;
      case RowBlock::Bal:
        out[r++] = EquationId::BalLinear1;
        out[r++] = EquationId::BalLinear2;
        out[r++] = EquationId::BalAngular;
        break;
    }
  }
  return out;
}

struct SplitMatrices {
  Mat9 a0, a1, b0, b1;
};

// Constant coefficient matrices of the variant. The entries carry mu and a
// through the eps^2 mass term mu^2 a P_{1/a} on the compatibility rows and
// the bending coefficient mu^{-2} on the angular balance.
inline SplitMatrices split_matrices(Variant variant, const Parameters& p) {
  namespace ix = planar_idx;
  const double mu2 = p.mu * p.mu;
  SplitMatrices s;
  s.a0 = Mat9::Zero();
  s.a1 = Mat9::Zero();
  s.b0 = Mat9::Zero();
  s.b1 = Mat9::Zero();
  const auto layout = row_layout(variant);
  for (int blk = 0; blk < 3; ++blk) {
    const int r = 3 * blk;
    switch (layout[blk]) {
      case RowBlock::Kin:
        s.a0(r + 0, ix::r1) = 1.0;
        s.a0(r + 1, ix::r2) = 1.0;
        s.a0(r + 2, ix::alpha) = 1.0;
        break;
      case RowBlock::Geo:
        s.b0(r + 0, ix::r1) = 1.0;
        s.b0(r + 1, ix::r2) = 1.0;
        s.b0(r + 2, ix::alpha) = 1.0;
        break;
      case RowBlock::Comp:
        // eps^2 mu^2 a P_{1/a} d_t n  -  d_s v
        s.a1(r + 0, ix::n1) = mu2 * p.a;
        s.a1(r + 1, ix::n3) = mu2;
        s.b0(r + 0, ix::v1) = -1.0;
        s.b0(r + 1, ix::v3) = -1.0;
        // d_t kappa - d_s omega
        s.a0(r + 2, ix::kappa) = 1.0;
        s.b0(r + 2, ix::omega) = -1.0;
        break;
      case RowBlock::Bal:
        // d_t v - d_s n
        s.a0(r + 0, ix::v1) = 1.0;
        s.a0(r + 1, ix::v3) = 1.0;
        s.b0(r + 0, ix::n1) = -1.0;
        s.b0(r + 1, ix::n3) = -1.0;
        // eps^2 d_t omega - mu^{-2} d_s kappa
        s.a1(r + 2, ix::omega) = 1.0;
        s.b0(r + 2, ix::kappa) = -1.0 / mu2;
        break;
    }
  }
  return s;
}

namespace detail {

// Leading-order source c0 and its eps^2 companion c1, written per row block.
// Sign convention: every equation is moved to the left-hand side.
inline void planar_source_blocks(Variant variant, const Parameters& p, const Vec9& phi,
                                 Vec9* c0, Vec9* c1) {
  namespace ix = planar_idx;
  const double alpha = phi[ix::alpha];
  const Vec2 v(phi[ix::v1], phi[ix::v3]);
  const Vec2 n(phi[ix::n1], phi[ix::n3]);
  const double omega = phi[ix::omega];
  const double kappa = phi[ix::kappa];
  const double mu2 = p.mu * p.mu;
  const Mat2 d = rotation2d(alpha);
  const Vec2 f(0.0, p.force_e2());

  if (c0) c0->setZero();
  if (c1) c1->setZero();
  const auto layout = row_layout(variant);
  for (int blk = 0; blk < 3; ++blk) {
    const int r = 3 * blk;
    switch (layout[blk]) {
      case RowBlock::Kin: {
        if (c0) {
          c0->segment<2>(r) = -(d * v);
          (*c0)[r + 2] = -omega;
        }
        break;
      }
      case RowBlock::Geo: {
        if (c0) {
          c0->segment<2>(r) = -(d * Vec2(0.0, 1.0));
          (*c0)[r + 2] = -kappa;
        }
        if (c1) {
          const Vec2 p_inv_a_n(n[0], n[1] / p.a);
          c1->segment<2>(r) = -mu2 * p.a * (d * p_inv_a_n);
        }
        break;
      }
      case RowBlock::Comp: {
        if (c0) {
          c0->segment<2>(r) = kappa * perp(v) + omega * Vec2(1.0, 0.0);
          (*c0)[r + 2] = 0.0;
        }
        if (c1) {
          const Vec2 pa_nperp(-n[1], p.a * n[0]);
          c1->segment<2>(r) = -mu2 * omega * pa_nperp;
        }
        break;
      }
      case RowBlock::Bal: {
        if (c0) {
          c0->segment<2>(r) = kappa * perp(n) - omega * perp(v) - d * f;
          (*c0)[r + 2] = -n[0];
        }
        if (c1) (*c1)[r + 2] = -mu2 * (1.0 - p.a) * n[0] * n[1];
        break;
      }
    }
  }
}

inline void planar_source_jacobian_blocks(Variant variant, const Parameters& p, const Vec9& phi,
                                          Mat9* j0, Mat9* j1) {
  namespace ix = planar_idx;
  const double alpha = phi[ix::alpha];
  const Vec2 v(phi[ix::v1], phi[ix::v3]);
  const Vec2 n(phi[ix::n1], phi[ix::n3]);
  const double omega = phi[ix::omega];
  const double kappa = phi[ix::kappa];
  const double mu2 = p.mu * p.mu;
  const Mat2 d = rotation2d(alpha);
  const Mat2 dp = rotation2d_deriv(alpha);
  const Vec2 f(0.0, p.force_e2());
  Mat2 cross;  // d(perp(z))/dz
  cross << 0.0, -1.0, 1.0, 0.0;

  if (j0) j0->setZero();
  if (j1) j1->setZero();
  const auto layout = row_layout(variant);
  for (int blk = 0; blk < 3; ++blk) {
    const int r = 3 * blk;
    switch (layout[blk]) {
      case RowBlock::Kin: {
        if (j0) {
          j0->block<2, 1>(r, ix::alpha) = -(dp * v);
          j0->block<2, 2>(r, ix::v1) = -d;
          (*j0)(r + 2, ix::omega) = -1.0;
        }
        break;
      }
      case RowBlock::Geo: {
        if (j0) {
          j0->block<2, 1>(r, ix::alpha) = -(dp * Vec2(0.0, 1.0));
          (*j0)(r + 2, ix::kappa) = -1.0;
        }
        if (j1) {
          const Vec2 p_inv_a_n(n[0], n[1] / p.a);
          j1->block<2, 1>(r, ix::alpha) = -mu2 * p.a * (dp * p_inv_a_n);
          Mat2 dn;
          dn << d(0, 0), d(0, 1) / p.a, d(1, 0), d(1, 1) / p.a;
          j1->block<2, 2>(r, ix::n1) = -mu2 * p.a * dn;
        }
        break;
      }
      case RowBlock::Comp: {
        if (j0) {
          j0->block<2, 2>(r, ix::v1) = kappa * cross;
          j0->block<2, 1>(r, ix::omega) = Vec2(1.0, 0.0);
          j0->block<2, 1>(r, ix::kappa) = perp(v);
        }
        if (j1) {
          (*j1)(r + 0, ix::n3) = mu2 * omega;
          (*j1)(r + 1, ix::n1) = -mu2 * p.a * omega;
          (*j1)(r + 0, ix::omega) = mu2 * n[1];
          (*j1)(r + 1, ix::omega) = -mu2 * p.a * n[0];
        }
        break;
      }
      case RowBlock::Bal: {
        if (j0) {
          j0->block<2, 1>(r, ix::alpha) = -(dp * f);
          j0->block<2, 2>(r, ix::v1) = -omega * cross;
          j0->block<2, 2>(r, ix::n1) = kappa * cross;
          j0->block<2, 1>(r, ix::omega) = -perp(v);
          j0->block<2, 1>(r, ix::kappa) = perp(n);
          (*j0)(r + 2, ix::n1) = -1.0;
        }
        if (j1) {
          (*j1)(r + 2, ix::n1) = -mu2 * (1.0 - p.a) * n[1];
          (*j1)(r + 2, ix::n3) = -mu2 * (1.0 - p.a) * n[0];
        }
        break;
      }
    }
  }
}

}  // namespace detail

inline Vec9 source_c0_planar(Variant variant, const Parameters& p, const Vec9& phi) {
  Vec9 c0;
  detail::planar_source_blocks(variant, p, phi, &c0, nullptr);
  return c0;
}

inline Vec9 source_c1_planar(Variant variant, const Parameters& p, const Vec9& phi) {
  Vec9 c1;
  detail::planar_source_blocks(variant, p, phi, nullptr, &c1);
  return c1;
}

inline Mat9 source_jacobian_c0_planar(Variant variant, const Parameters& p, const Vec9& phi) {
  Mat9 j0;
  detail::planar_source_jacobian_blocks(variant, p, phi, &j0, nullptr);
  return j0;
}

inline Mat9 source_jacobian_c1_planar(Variant variant, const Parameters& p, const Vec9& phi) {
  Mat9 j1;
  detail::planar_source_jacobian_blocks(variant, p, phi, nullptr, &j1);
  return j1;
}

// Source of the selected system. Limit and Correction use the leading order
// only; EpsDependent folds in eps^2 c1.
inline Vec9 source_planar(SystemKind kind, Variant variant, const Parameters& p,
                          const Vec9& phi) {
  Vec9 c0, c1;
  detail::planar_source_blocks(variant, p, phi, &c0,
                               kind == SystemKind::EpsDependent ? &c1 : nullptr);
  if (kind == SystemKind::EpsDependent) return c0 + p.epsilon * p.epsilon * c1;
  return c0;
}

inline Mat9 source_jacobian_planar(SystemKind kind, Variant variant, const Parameters& p,
                                   const Vec9& phi) {
  Mat9 j0, j1;
  detail::planar_source_jacobian_blocks(variant, p, phi, &j0,
                                        kind == SystemKind::EpsDependent ? &j1 : nullptr);
  if (kind == SystemKind::EpsDependent) return j0 + p.epsilon * p.epsilon * j1;
  return j0;
}

// Forcing of the first-order correction system,
//   f[Phi0] = -(A1 dPhi0/dt + B1 dPhi0/ds + c1(Phi0)).
// B1 vanishes for this model, so ds_phi0 does not enter; it is kept in the
// signature for the general form.
inline Vec9 correction_rhs_planar(Variant variant, const Parameters& p, const Vec9& phi0,
                                  const Vec9& dt_phi0, const Vec9& ds_phi0) {
  const SplitMatrices s = split_matrices(variant, p);
  return -(s.a1 * dt_phi0 + s.b1 * ds_phi0 + source_c1_planar(variant, p, phi0));
}

// Cantilever initial data: straight rod along e_1, at rest and stress-free.
inline StateField initial_state_planar(const GridSpec& grid) {
  grid.validate();
  StateField f(kPlanarUnknowns, grid.n_cells + 1);
  for (int i = 0; i <= grid.n_cells; ++i) f.node(i)[planar_idx::r1] = i * grid.ds();
  return f;
}

// ---------------------------------------------------------------------------
// Model object consumed by the collocation engine.
// ---------------------------------------------------------------------------

template <int M>
struct StencilEvalT {
  Eigen::Matrix<double, M, 1> mid, dt, ds;
};

template <int M>
struct SourceEvalT {
  Eigen::Matrix<double, M, 1> value;  // residual minus A*dt - B*ds
  Eigen::Matrix<double, M, M> jac;    // derivative of value w.r.t. mid
};

class PlanarModel {
 public:
  static constexpr int m = kPlanarUnknowns;
  static constexpr int left_rows = 6;
  static constexpr int right_rows = 3;
  using VecM = Vec9;
  using MatM = Mat9;
  using Stencil = StencilEvalT<m>;
  using SourceEval = SourceEvalT<m>;

  PlanarModel(const Parameters& params, Variant variant, SystemKind kind)
      : params_(params), variant_(variant), kind_(kind), split_(split_matrices(variant, params)) {
    params_.validate();
    const double e2 = (kind == SystemKind::EpsDependent) ? params.epsilon * params.epsilon : 0.0;
    a_ = split_.a0 + e2 * split_.a1;
    b_ = split_.b0 + e2 * split_.b1;
  }

  const Parameters& params() const { return params_; }
  Variant variant() const { return variant_; }
  SystemKind kind() const { return kind_; }
  const SplitMatrices& split() const { return split_; }
  const Mat9& matrix_a() const { return a_; }
  const Mat9& matrix_b() const { return b_; }
  bool needs_background() const { return kind_ == SystemKind::Correction; }
  bool right_couples_inner() const { return false; }

  // Residual pieces at one collocation point. For the correction system the
  // value is the limit Jacobian at the background state applied to the own
  // midpoint, minus the forcing assembled from the background stencils.
  SourceEval source_eval(const Stencil& self, const Stencil* background) const {
    SourceEval out;
    if (kind_ == SystemKind::Correction) {
      if (!background) throw std::invalid_argument("PlanarModel: correction needs background");
      out.jac = source_jacobian_c0_planar(variant_, params_, background->mid);
      out.value = out.jac * self.mid -
                  correction_rhs_planar(variant_, params_, background->mid, background->dt,
                                        background->ds);
    } else {
      out.jac = source_jacobian_planar(kind_, variant_, params_, self.mid);
      out.value = source_planar(kind_, variant_, params_, self.mid);
    }
    return out;
  }

  Vec9 point_residual(const Stencil& self, const Stencil* background) const {
    return a_ * self.dt + b_ * self.ds + source_eval(self, background).value;
  }

  // --- boundary rows -------------------------------------------------------
  //
  // Left (6 rows) and right (3 rows) closures of the cantilever:
  //   (S)  r(0), alpha(0), v(0), omega(0) prescribed
  //   (T)  kinematic rows collocated at the node s=0 (two-point time stencil,
  //        pinning r(0) and alpha(0)) + v(0), omega(0) prescribed
  //   (M)  r(0), alpha(0) prescribed + kinematic curve rows at s=0 (pinning
  //        v(0)) + omega(0) prescribed
  // and n(1), kappa(1) prescribed at the free end for every variant. Closing
  // (M) on the right with the one-sided linear-momentum balance instead of
  // the free-end condition leaves the level of the tangential force
  // undetermined whenever kappa vanishes identically (the balance rows see
  // only force differences in the limit system), so the straight initial
  // state would make the Jacobian exactly singular.
  // The correction system uses the same structure with homogeneous data and
  // the model rows linearized about the background.

  struct BoundaryLeft {
    Eigen::Matrix<double, left_rows, 1> resid;
    Eigen::Matrix<double, left_rows, m> jac;  // w.r.t. new node-0 values
  };

  struct BoundaryRight {
    Eigen::Matrix<double, right_rows, 1> resid;
    Eigen::Matrix<double, right_rows, m> jac_inner;  // w.r.t. new node N-1
    Eigen::Matrix<double, right_rows, m> jac_last;   // w.r.t. new node N
  };

  BoundaryLeft boundary_left(const Vec9& new0, const Vec9& old0, const Vec9* bg_new0,
                             const Vec9* bg_old0, const GridSpec& grid) const {
    namespace ix = planar_idx;
    BoundaryLeft out;
    out.resid.setZero();
    out.jac.setZero();
    int r = 0;
    auto dirichlet = [&](int comp) {
      out.resid[r] = new0[comp];
      out.jac(r, comp) = 1.0;
      ++r;
    };
    auto kinematic_rows = [&](bool with_angle) {
      // model kinematic rows collocated at the node with the two-point stencil
      const Vec9 dt = (new0 - old0) / grid.dt;
      const Vec9 mid = grid.lambda * new0 + (1.0 - grid.lambda) * old0;
      Vec9 value;
      Mat9 jac_mid;
      if (kind_ == SystemKind::Correction) {
        const Vec9 bg_mid = grid.lambda * (*bg_new0) + (1.0 - grid.lambda) * (*bg_old0);
        jac_mid = source_jacobian_c0_planar(Variant::T, params_, bg_mid);
        value = jac_mid * mid;  // forcing vanishes on the kinematic rows
      } else {
        jac_mid = source_jacobian_planar(kind_, Variant::T, params_, mid);
        value = source_planar(kind_, Variant::T, params_, mid);
      }
      // rows 0..2 of variant T are the kinematic block
      const int count = with_angle ? 3 : 2;
      for (int k = 0; k < count; ++k) {
        out.resid[r] = dt[ix::r1 + k] + value[k];
        out.jac.row(r) = grid.lambda * jac_mid.row(k);
        out.jac(r, ix::r1 + k) += 1.0 / grid.dt;
        ++r;
      }
    };
    switch (variant_) {
      case Variant::S:
        dirichlet(ix::r1);
        dirichlet(ix::r2);
        dirichlet(ix::alpha);
        dirichlet(ix::v1);
        dirichlet(ix::v3);
        dirichlet(ix::omega);
        break;
      case Variant::T:
        kinematic_rows(true);
        dirichlet(ix::v1);
        dirichlet(ix::v3);
        dirichlet(ix::omega);
        break;
      case Variant::M:
        dirichlet(ix::r1);
        dirichlet(ix::r2);
        dirichlet(ix::alpha);
        kinematic_rows(false);
        dirichlet(ix::omega);
        break;
    }
    return out;
  }

  BoundaryRight boundary_right(const Vec9& /*new_inner*/, const Vec9& new_last,
                               const Vec9& /*old_inner*/, const Vec9& /*old_last*/, const Vec9*,
                               const Vec9*, const Vec9*, const Vec9*, const GridSpec&) const {
    namespace ix = planar_idx;
    BoundaryRight out;
    out.resid.setZero();
    out.jac_inner.setZero();
    out.jac_last.setZero();
    int r = 0;
    auto dirichlet = [&](int comp) {
      out.resid[r] = new_last[comp];
      out.jac_last(r, comp) = 1.0;
      ++r;
    };
    dirichlet(ix::n1);
    dirichlet(ix::n3);
    dirichlet(ix::kappa);
    return out;
  }

  StateField initial_state(const GridSpec& grid) const {
    if (kind_ == SystemKind::Correction) return StateField(m, grid.n_cells + 1);
    return initial_state_planar(grid);
  }

  void normalize_state(StateField&) const {}  // nothing to renormalize in 2d

 private:
  Parameters params_;
  Variant variant_;
  SystemKind kind_;
  SplitMatrices split_;
  Mat9 a_, b_;
};

// Spec-style convenience wrapper: stacked boundary residual (6 left rows,
// then 3 right rows). The right closure of variant (M) needs the inner node
// of the last cell, hence the cell pair in the signature.
inline Vec9 boundary_residual_planar(const PlanarModel& model, const Vec9& left_new,
                                     const Vec9& left_old, const Vec9& right_inner_new,
                                     const Vec9& right_last_new, const Vec9& right_inner_old,
                                     const Vec9& right_last_old, const GridSpec& grid,
                                     const Vec9* bg_left_new = nullptr,
                                     const Vec9* bg_left_old = nullptr,
                                     const Vec9* bg_right_inner_new = nullptr,
                                     const Vec9* bg_right_last_new = nullptr,
                                     const Vec9* bg_right_inner_old = nullptr,
                                     const Vec9* bg_right_last_old = nullptr) {
  Vec9 out;
  out.head<6>() = model.boundary_left(left_new, left_old, bg_left_new, bg_left_old, grid).resid;
  out.tail<3>() = model
                      .boundary_right(right_inner_new, right_last_new, right_inner_old,
                                      right_last_old, bg_right_inner_new, bg_right_last_new,
                                      bg_right_inner_old, bg_right_last_old, grid)
                      .resid;
  return out;
}

}  // namespace cosserat

#endif  // COSSERAT_PLANAR_HPP
