// spatial.hpp
//
// Full three-dimensional rod system with a unit-quaternion triad (m = 19
// unknowns per node: position, quaternion, and the director-basis tuples of
// velocity, contact force, angular velocity, curvature). Serves as an
// independent cross-check of the planar model through the in-plane embedding
// d_2 = e_3, and is steppable through the collocation engine for variant (S),
// whose boundary conditions are all explicit.
//
// Quaternions are scalar-first (w, x, y, z) with the right-multiplication
// rate map dq/dt = 1/2 q * (0, omega), which realizes dD/dt = -omega x D for
// the director matrix D = R(q)^T.

#ifndef COSSERAT_SPATIAL_HPP
#define COSSERAT_SPATIAL_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cosserat/core.hpp"
#include "cosserat/planar.hpp"

namespace cosserat {

inline constexpr int kSpatialUnknowns = 19;

using Vec19 = Eigen::Matrix<double, 19, 1>;
using Mat19 = Eigen::Matrix<double, 19, 19>;

namespace spatial_idx {
inline constexpr int r = 0;      // 3 outer-basis position components
inline constexpr int q = 3;      // 4 quaternion components
inline constexpr int v = 7;      // 3 velocity components (director basis)
inline constexpr int n = 10;     // 3 contact-force components
inline constexpr int omega = 13; // 3 angular-velocity components
inline constexpr int kappa = 16; // 3 curvature components
}  // namespace spatial_idx

// --- quaternion helpers ----------------------------------------------------

inline Vec4 quat_mul(const Vec4& a, const Vec4& b) {
  return Vec4(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
              a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
              a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
              a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]);
}

inline Mat3 skew(const Vec3& z) {
  Mat3 s;
  s << 0.0, -z[2], z[1], z[2], 0.0, -z[0], -z[1], z[0], 0.0;
  return s;
}

// Rotation matrix of a (near-)unit quaternion; R(q) e_i gives the outer
// coordinates of director d_i.
inline Mat3 quat_to_rotation(const Vec4& q) {
  const double nrm = q.norm();
  if (std::abs(nrm - 1.0) > 1e-6)
    throw std::domain_error("quat_to_rotation: quaternion is not unit length");
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

namespace detail3d {

// Homogeneous form |q|^2 R(q), polynomial in q; used inside residuals so the
// derivatives below stay exact for near-unit quaternions.
inline Vec3 rot_apply(const Vec4& q, const Vec3& x) {
  const double w = q[0];
  const Vec3 u = q.tail<3>();
  return (w * w - u.squaredNorm()) * x + 2.0 * u.dot(x) * u + 2.0 * w * u.cross(x);
}

inline Vec3 rot_apply_t(const Vec4& q, const Vec3& x) {
  Vec4 conj(q[0], -q[1], -q[2], -q[3]);
  return rot_apply(conj, x);
}

// d(rot_apply(q, x))/dq as a 3x4 block, x held fixed.
inline Eigen::Matrix<double, 3, 4> d_rot_apply_dq(const Vec4& q, const Vec3& x) {
  const double w = q[0];
  const Vec3 u = q.tail<3>();
  Eigen::Matrix<double, 3, 4> d;
  d.col(0) = 2.0 * (w * x + u.cross(x));
  d.block<3, 3>(0, 1) =
      2.0 * (u.dot(x) * Mat3::Identity() + u * x.transpose() - x * u.transpose() - w * skew(x));
  return d;
}

inline Eigen::Matrix<double, 3, 4> d_rot_apply_t_dq(const Vec4& q, const Vec3& x) {
  const double w = q[0];
  const Vec3 u = q.tail<3>();
  Eigen::Matrix<double, 3, 4> d;
  d.col(0) = 2.0 * (w * x - u.cross(x));
  d.block<3, 3>(0, 1) =
      2.0 * (u.dot(x) * Mat3::Identity() + u * x.transpose() - x * u.transpose() + w * skew(x));
  return d;
}

// Matrix of rot_apply (homogeneous rotation), used for the v / n columns.
inline Mat3 rot_matrix_hom(const Vec4& q) {
  const double w = q[0];
  const Vec3 u = q.tail<3>();
  return (w * w - u.squaredNorm()) * Mat3::Identity() + 2.0 * u * u.transpose() +
         2.0 * w * skew(u);
}

// q * (0, w) as a linear map in q (right multiplication matrix).
inline Eigen::Matrix<double, 4, 4> omega_right(const Vec3& w) {
  Eigen::Matrix<double, 4, 4> o;
  o(0, 0) = 0.0;
  o.block<1, 3>(0, 1) = -w.transpose();
  o.block<3, 1>(1, 0) = w;
  o.block<3, 3>(1, 1) = -skew(w);
  return o;
}

// d(q * (0, w))/dw: the x,y,z columns of the left multiplication matrix.
inline Eigen::Matrix<double, 4, 3> left_mul_vec_cols(const Vec4& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix<double, 4, 3> l;
  l << -x, -y, -z,
        w, -z,  y,
        z,  w, -x,
       -y,  x,  w;
  return l;
}

inline Mat3 p_diag(double k) { return Vec3(1.0, 1.0, k).asDiagonal(); }

}  // namespace detail3d

// --- state -------------------------------------------------------------------

struct SpatialState {
  Vec3 r = Vec3::Zero();
  Vec4 q = Vec4(1, 0, 0, 0);
  Vec3 v = Vec3::Zero();
  Vec3 n = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  Vec3 kappa = Vec3::Zero();

  static SpatialState from_vector(const Vec19& x) {
    SpatialState s;
    s.r = x.segment<3>(spatial_idx::r);
    s.q = x.segment<4>(spatial_idx::q);
    s.v = x.segment<3>(spatial_idx::v);
    s.n = x.segment<3>(spatial_idx::n);
    s.omega = x.segment<3>(spatial_idx::omega);
    s.kappa = x.segment<3>(spatial_idx::kappa);
    return s;
  }

  Vec19 to_vector() const {
    Vec19 x;
    x.segment<3>(spatial_idx::r) = r;
    x.segment<4>(spatial_idx::q) = q;
    x.segment<3>(spatial_idx::v) = v;
    x.segment<3>(spatial_idx::n) = n;
    x.segment<3>(spatial_idx::omega) = omega;
    x.segment<3>(spatial_idx::kappa) = kappa;
    return x;
  }
};

// --- equation layout ---------------------------------------------------------

enum class SpatialBlock { KinR, QuatT, GeoR, QuatS, CompN, CompK, BalV, BalW };

inline int spatial_block_rows(SpatialBlock b) {
  return (b == SpatialBlock::QuatT || b == SpatialBlock::QuatS) ? 4 : 3;
}

// The quaternion carries four components for three rotational degrees of
// freedom, so variant (M) — which keeps both the temporal and the spatial
// triad equations — has 20 residual rows; (T) and (S) have 19.
inline std::vector<SpatialBlock> spatial_layout(Variant v) {
  switch (v) {
    case Variant::M:
      return {SpatialBlock::KinR, SpatialBlock::QuatT, SpatialBlock::GeoR,
              SpatialBlock::QuatS, SpatialBlock::BalV, SpatialBlock::BalW};
    case Variant::T:
      return {SpatialBlock::KinR, SpatialBlock::QuatT, SpatialBlock::CompN,
              SpatialBlock::CompK, SpatialBlock::BalV, SpatialBlock::BalW};
    case Variant::S:
      return {SpatialBlock::GeoR, SpatialBlock::QuatS, SpatialBlock::CompN,
              SpatialBlock::CompK, SpatialBlock::BalV, SpatialBlock::BalW};
  }
  throw std::logic_error("spatial_layout: bad variant");
}

inline int spatial_rows(Variant v) {
  int rows = 0;
  for (SpatialBlock b : spatial_layout(v)) rows += spatial_block_rows(b);
  return rows;
}

struct SpatialSplit {
  MatX a0, a1, b0, b1;  // rows x 19
};

inline SpatialSplit split_matrices_3d(Variant variant, const Parameters& p) {
  namespace ix = spatial_idx;
  using detail3d::p_diag;
  const double mu2 = p.mu * p.mu;
  const int rows = spatial_rows(variant);
  SpatialSplit s{MatX::Zero(rows, 19), MatX::Zero(rows, 19), MatX::Zero(rows, 19),
                 MatX::Zero(rows, 19)};
  int r = 0;
  for (SpatialBlock b : spatial_layout(variant)) {
    switch (b) {
      case SpatialBlock::KinR:
        s.a0.block<3, 3>(r, ix::r).setIdentity();
        break;
      case SpatialBlock::QuatT:
        s.a0.block<4, 4>(r, ix::q).setIdentity();
        break;
      case SpatialBlock::GeoR:
        s.b0.block<3, 3>(r, ix::r).setIdentity();
        break;
      case SpatialBlock::QuatS:
        s.b0.block<4, 4>(r, ix::q).setIdentity();
        break;
      case SpatialBlock::CompN:
        s.a1.block<3, 3>(r, ix::n) = mu2 * p.a * p_diag(1.0 / p.a);
        s.b0.block<3, 3>(r, ix::v) = -Mat3::Identity();
        break;
      case SpatialBlock::CompK:
        s.a0.block<3, 3>(r, ix::kappa).setIdentity();
        s.b0.block<3, 3>(r, ix::omega) = -Mat3::Identity();
        break;
      case SpatialBlock::BalV:
        s.a0.block<3, 3>(r, ix::v).setIdentity();
        s.b0.block<3, 3>(r, ix::n) = -Mat3::Identity();
        break;
      case SpatialBlock::BalW:
        s.a1.block<3, 3>(r, ix::omega) = p_diag(2.0);
        s.b0.block<3, 3>(r, ix::kappa) = -(1.0 / mu2) * p_diag(2.0 / p.a);
        break;
    }
    r += spatial_block_rows(b);
  }
  return s;
}

namespace detail3d {

inline void source_blocks_3d(Variant variant, const Parameters& p, const Vec19& phi, VecX* c0,
                             VecX* c1) {
  namespace ix = spatial_idx;
  const SpatialState st = SpatialState::from_vector(phi);
  const double mu2 = p.mu * p.mu;
  const Vec3 e3(0, 0, 1);
  const Vec3 f_out(0.0, p.force_e2(), 0.0);
  const Mat3 p_inv_a = p_diag(1.0 / p.a);
  const int rows = spatial_rows(variant);
  if (c0) c0->setZero(rows);
  if (c1) c1->setZero(rows);
  int r = 0;
  for (SpatialBlock b : spatial_layout(variant)) {
    switch (b) {
      case SpatialBlock::KinR:
        if (c0) c0->segment<3>(r) = -rot_apply(st.q, st.v);
        break;
      case SpatialBlock::QuatT:
        if (c0) c0->segment<4>(r) = -0.5 * quat_mul(st.q, Vec4(0, st.omega[0], st.omega[1], st.omega[2]));
        break;
      case SpatialBlock::GeoR:
        if (c0) c0->segment<3>(r) = -rot_apply(st.q, e3);
        if (c1) c1->segment<3>(r) = -mu2 * p.a * rot_apply(st.q, p_inv_a * st.n);
        break;
      case SpatialBlock::QuatS:
        if (c0) c0->segment<4>(r) = -0.5 * quat_mul(st.q, Vec4(0, st.kappa[0], st.kappa[1], st.kappa[2]));
        break;
      case SpatialBlock::CompN:
        if (c0) c0->segment<3>(r) = -st.kappa.cross(st.v) - e3.cross(st.omega);
        if (c1) c1->segment<3>(r) = -mu2 * p.a * (p_inv_a * st.n).cross(st.omega);
        break;
      case SpatialBlock::CompK:
        if (c0) c0->segment<3>(r) = -st.kappa.cross(st.omega);
        break;
      case SpatialBlock::BalV:
        if (c0)
          c0->segment<3>(r) =
              -st.kappa.cross(st.n) - st.v.cross(st.omega) - rot_apply_t(st.q, f_out);
        break;
      case SpatialBlock::BalW:
        if (c0)
          c0->segment<3>(r) =
              -(1.0 / mu2) * st.kappa.cross(p_diag(2.0 / p.a) * st.kappa) - e3.cross(st.n);
        if (c1)
          c1->segment<3>(r) = -mu2 * p.a * (p_inv_a * st.n).cross(st.n) -
                              (p_diag(2.0) * st.omega).cross(st.omega);
        break;
    }
    r += spatial_block_rows(b);
  }
}

inline void source_jacobian_blocks_3d(Variant variant, const Parameters& p, const Vec19& phi,
                                      MatX* j0, MatX* j1) {
  namespace ix = spatial_idx;
  const SpatialState st = SpatialState::from_vector(phi);
  const double mu2 = p.mu * p.mu;
  const Vec3 e3(0, 0, 1);
  const Vec3 f_out(0.0, p.force_e2(), 0.0);
  const Mat3 p_inv_a = p_diag(1.0 / p.a);
  const Mat3 p2 = p_diag(2.0);
  const int rows = spatial_rows(variant);
  if (j0) j0->setZero(rows, 19);
  if (j1) j1->setZero(rows, 19);
  int r = 0;
  for (SpatialBlock b : spatial_layout(variant)) {
    switch (b) {
      case SpatialBlock::KinR:
        if (j0) {
          j0->block<3, 4>(r, ix::q) = -d_rot_apply_dq(st.q, st.v);
          j0->block<3, 3>(r, ix::v) = -rot_matrix_hom(st.q);
        }
        break;
      case SpatialBlock::QuatT:
        if (j0) {
          j0->block<4, 4>(r, ix::q) = -0.5 * omega_right(st.omega);
          j0->block<4, 3>(r, ix::omega) = -0.5 * left_mul_vec_cols(st.q);
        }
        break;
      case SpatialBlock::GeoR:
        if (j0) j0->block<3, 4>(r, ix::q) = -d_rot_apply_dq(st.q, e3);
        if (j1) {
          j1->block<3, 4>(r, ix::q) = -mu2 * p.a * d_rot_apply_dq(st.q, p_inv_a * st.n);
          j1->block<3, 3>(r, ix::n) = -mu2 * p.a * rot_matrix_hom(st.q) * p_inv_a;
        }
        break;
      case SpatialBlock::QuatS:
        if (j0) {
          j0->block<4, 4>(r, ix::q) = -0.5 * omega_right(st.kappa);
          j0->block<4, 3>(r, ix::kappa) = -0.5 * left_mul_vec_cols(st.q);
        }
        break;
      case SpatialBlock::CompN:
        if (j0) {
          j0->block<3, 3>(r, ix::v) = -skew(st.kappa);
          j0->block<3, 3>(r, ix::kappa) = skew(st.v);
          j0->block<3, 3>(r, ix::omega) = -skew(e3);
        }
        if (j1) {
          j1->block<3, 3>(r, ix::n) = mu2 * p.a * skew(st.omega) * p_inv_a;
          j1->block<3, 3>(r, ix::omega) = -mu2 * p.a * skew(p_inv_a * st.n);
        }
        break;
      case SpatialBlock::CompK:
        if (j0) {
          j0->block<3, 3>(r, ix::omega) = -skew(st.kappa);
          j0->block<3, 3>(r, ix::kappa) = skew(st.omega);
        }
        break;
      case SpatialBlock::BalV:
        if (j0) {
          j0->block<3, 4>(r, ix::q) = -d_rot_apply_t_dq(st.q, f_out);
          j0->block<3, 3>(r, ix::v) = skew(st.omega);
          j0->block<3, 3>(r, ix::n) = -skew(st.kappa);
          j0->block<3, 3>(r, ix::omega) = -skew(st.v);
          j0->block<3, 3>(r, ix::kappa) = skew(st.n);
        }
        break;
      case SpatialBlock::BalW:
        if (j0) {
          const Mat3 p2a = p_diag(2.0 / p.a);
          j0->block<3, 3>(r, ix::kappa) =
              -(1.0 / mu2) * (skew(st.kappa) * p2a - skew(p2a * st.kappa));
          j0->block<3, 3>(r, ix::n) = -skew(e3);
        }
        if (j1) {
          j1->block<3, 3>(r, ix::n) = -mu2 * p.a * (skew(p_inv_a * st.n) - skew(st.n) * p_inv_a);
          j1->block<3, 3>(r, ix::omega) = -(skew(p2 * st.omega) - skew(st.omega) * p2);
        }
        break;
    }
    r += spatial_block_rows(b);
  }
}

}  // namespace detail3d

inline VecX source_c0_3d(Variant variant, const Parameters& p, const Vec19& phi) {
  VecX c0;
  detail3d::source_blocks_3d(variant, p, phi, &c0, nullptr);
  return c0;
}

inline VecX source_c1_3d(Variant variant, const Parameters& p, const Vec19& phi) {
  VecX c1;
  detail3d::source_blocks_3d(variant, p, phi, nullptr, &c1);
  return c1;
}

inline MatX source_jacobian_c0_3d(Variant variant, const Parameters& p, const Vec19& phi) {
  MatX j0;
  detail3d::source_jacobian_blocks_3d(variant, p, phi, &j0, nullptr);
  return j0;
}

inline MatX source_jacobian_c1_3d(Variant variant, const Parameters& p, const Vec19& phi) {
  MatX j1;
  detail3d::source_jacobian_blocks_3d(variant, p, phi, nullptr, &j1);
  return j1;
}

// Pointwise residual of the eps-dependent or limit system; 19 rows for (T)
// and (S), 20 for (M).
inline VecX residual_3d(SystemKind kind, Variant variant, const Parameters& p, const Vec19& phi,
                        const Vec19& dt_phi, const Vec19& ds_phi) {
  if (kind == SystemKind::Correction)
    throw std::invalid_argument("residual_3d: correction system needs a background state");
  const SpatialSplit s = split_matrices_3d(variant, p);
  const double e2 = (kind == SystemKind::EpsDependent) ? p.epsilon * p.epsilon : 0.0;
  VecX c0, c1;
  detail3d::source_blocks_3d(variant, p, phi, &c0, kind == SystemKind::EpsDependent ? &c1 : nullptr);
  VecX out = (s.a0 + e2 * s.a1) * dt_phi + (s.b0 + e2 * s.b1) * ds_phi + c0;
  if (kind == SystemKind::EpsDependent) out += e2 * c1;
  return out;
}

// Forcing of the first-order correction, f[Phi0] = -(A1 dt + B1 ds + c1).
inline VecX correction_rhs_3d(Variant variant, const Parameters& p, const Vec19& phi0,
                              const Vec19& dt_phi0, const Vec19& ds_phi0) {
  const SpatialSplit s = split_matrices_3d(variant, p);
  return -(s.a1 * dt_phi0 + s.b1 * ds_phi0 + source_c1_3d(variant, p, phi0));
}

// Pointwise residual of the linear correction system about a background state.
inline VecX residual_3d_correction(Variant variant, const Parameters& p, const Vec19& corr,
                                   const Vec19& dt_corr, const Vec19& ds_corr, const Vec19& bg,
                                   const Vec19& dt_bg, const Vec19& ds_bg) {
  const SpatialSplit s = split_matrices_3d(variant, p);
  return s.a0 * dt_corr + s.b0 * ds_corr + source_jacobian_c0_3d(variant, p, bg) * corr -
         correction_rhs_3d(variant, p, bg, dt_bg, ds_bg);
}

// --- planar embedding (motion in the e1-e2 plane with d_2 = e_3) ------------

// Quaternion of the planar triad: d_3 = (cos a, sin a, 0), d_2 = e_3.
inline Vec4 planar_quaternion(double alpha) {
  const double c = std::cos(0.5 * alpha), s = std::sin(0.5 * alpha);
  return 0.5 * Vec4(c - s, c - s, c + s, c + s);
}

// d/dalpha of planar_quaternion; has norm 1/2.
inline Vec4 planar_quaternion_tangent(double alpha) {
  const double c = std::cos(0.5 * alpha), s = std::sin(0.5 * alpha);
  return 0.25 * Vec4(-(s + c), -(s + c), c - s, c - s);
}

inline Vec19 embed_planar(const Vec9& phi) {
  namespace ix = planar_idx;
  SpatialState st;
  st.r = Vec3(phi[ix::r1], phi[ix::r2], 0.0);
  st.q = planar_quaternion(phi[ix::alpha]);
  st.v = Vec3(phi[ix::v1], 0.0, phi[ix::v3]);
  st.n = Vec3(phi[ix::n1], 0.0, phi[ix::n3]);
  st.omega = Vec3(0.0, phi[ix::omega], 0.0);
  st.kappa = Vec3(0.0, phi[ix::kappa], 0.0);
  return st.to_vector();
}

// Derivative of embed_planar at phi applied to a planar increment dphi.
inline Vec19 embed_tangent(const Vec9& phi, const Vec9& dphi) {
  namespace ix = planar_idx;
  Vec19 out = Vec19::Zero();
  out.segment<3>(spatial_idx::r) = Vec3(dphi[ix::r1], dphi[ix::r2], 0.0);
  out.segment<4>(spatial_idx::q) = planar_quaternion_tangent(phi[ix::alpha]) * dphi[ix::alpha];
  out.segment<3>(spatial_idx::v) = Vec3(dphi[ix::v1], 0.0, dphi[ix::v3]);
  out.segment<3>(spatial_idx::n) = Vec3(dphi[ix::n1], 0.0, dphi[ix::n3]);
  out.segment<3>(spatial_idx::omega) = Vec3(0.0, dphi[ix::omega], 0.0);
  out.segment<3>(spatial_idx::kappa) = Vec3(0.0, dphi[ix::kappa], 0.0);
  return out;
}

// Inverse of the embedding on its image.
inline Vec9 restrict_planar(const Vec19& x) {
  namespace ix = planar_idx;
  const SpatialState st = SpatialState::from_vector(x);
  Vec9 phi;
  phi[ix::r1] = st.r[0];
  phi[ix::r2] = st.r[1];
  // angle of d_3 against e_1, recovered from the rotation matrix
  const Mat3 rot = detail3d::rot_matrix_hom(st.q);
  phi[ix::alpha] = std::atan2(rot(1, 2), rot(0, 2));
  phi[ix::v1] = st.v[0];
  phi[ix::v3] = st.v[2];
  phi[ix::n1] = st.n[0];
  phi[ix::n3] = st.n[2];
  phi[ix::omega] = st.omega[1];
  phi[ix::kappa] = st.kappa[1];
  return phi;
}

// Row map of the embedding: where each planar residual row lands in the 3d
// residual, and which 3d rows must vanish on embedded states. The quaternion
// rows carry the planar angle rows along the direction
// planar_quaternion_tangent(alpha) (norm 1/2), so the planar value is
// 4 * u . (quaternion block).
struct PlanarRowExtraction {
  Vec9 planar;            // planar residual recovered from the 3d rows
  double complement_norm; // size of everything that must vanish
};

inline PlanarRowExtraction extract_planar_rows(Variant variant, const VecX& r3d, double alpha) {
  const Vec4 u = planar_quaternion_tangent(alpha);
  PlanarRowExtraction out;
  out.planar.setZero();
  double comp2 = 0.0;
  int r3 = 0;   // row cursor in the 3d residual
  int r2 = 0;   // row cursor in the planar residual
  for (SpatialBlock b : spatial_layout(variant)) {
    switch (b) {
      case SpatialBlock::KinR:
      case SpatialBlock::GeoR: {
        // outer components: planar rows are components 1,2; component 3 vanishes
        out.planar[r2 + 0] = r3d[r3 + 0];
        out.planar[r2 + 1] = r3d[r3 + 1];
        comp2 += r3d[r3 + 2] * r3d[r3 + 2];
        r2 += 2;
        break;
      }
      case SpatialBlock::QuatT:
      case SpatialBlock::QuatS: {
        const Vec4 block = r3d.segment<4>(r3);
        const double val = 4.0 * u.dot(block);
        out.planar[r2] = val;
        comp2 += (block - u * val).squaredNorm();
        r2 += 1;
        break;
      }
      case SpatialBlock::CompN:
      case SpatialBlock::BalV: {
        // director components: planar rows are components 1,3; component 2 vanishes
        out.planar[r2 + 0] = r3d[r3 + 0];
        out.planar[r2 + 1] = r3d[r3 + 2];
        comp2 += r3d[r3 + 1] * r3d[r3 + 1];
        r2 += 2;
        break;
      }
      case SpatialBlock::CompK:
      case SpatialBlock::BalW: {
        out.planar[r2] = r3d[r3 + 1];
        comp2 += r3d[r3 + 0] * r3d[r3 + 0] + r3d[r3 + 2] * r3d[r3 + 2];
        r2 += 1;
        break;
      }
    }
    r3 += spatial_block_rows(b);
  }
  out.complement_norm = std::sqrt(comp2);
  return out;
}

// --- engine model for variant (S) -------------------------------------------
//
// All cantilever boundary conditions are explicit for (S): position, triad,
// velocity and angular velocity clamped at s=0, force and curvature free at
// s=1. The other variants would need numerically closed boundary rows in 3d
// and are supported for residual evaluation only.

class SpatialModel {
 public:
  static constexpr int m = kSpatialUnknowns;
  static constexpr int left_rows = 13;
  static constexpr int right_rows = 6;
  using VecM = Vec19;
  using MatM = Mat19;
  using Stencil = StencilEvalT<m>;
  using SourceEval = SourceEvalT<m>;

  SpatialModel(const Parameters& params, SystemKind kind)
      : params_(params), kind_(kind), split_(split_matrices_3d(Variant::S, params)) {
    params_.validate();
    const double e2 = (kind == SystemKind::EpsDependent) ? params.epsilon * params.epsilon : 0.0;
    a_ = split_.a0 + e2 * split_.a1;
    b_ = split_.b0 + e2 * split_.b1;
  }

  const Parameters& params() const { return params_; }
  Variant variant() const { return Variant::S; }
  SystemKind kind() const { return kind_; }
  const Mat19& matrix_a() const { return a_; }
  const Mat19& matrix_b() const { return b_; }
  bool needs_background() const { return kind_ == SystemKind::Correction; }
  bool right_couples_inner() const { return false; }

  SourceEval source_eval(const Stencil& self, const Stencil* background) const {
    SourceEval out;
    if (kind_ == SystemKind::Correction) {
      if (!background) throw std::invalid_argument("SpatialModel: correction needs background");
      out.jac = source_jacobian_c0_3d(Variant::S, params_, background->mid);
      out.value = out.jac * self.mid - correction_rhs_3d(Variant::S, params_, background->mid,
                                                         background->dt, background->ds);
    } else {
      out.jac = source_jacobian_3d_folded(self.mid);
      VecX c0, c1;
      detail3d::source_blocks_3d(Variant::S, params_, self.mid, &c0,
                                 kind_ == SystemKind::EpsDependent ? &c1 : nullptr);
      out.value = c0;
      if (kind_ == SystemKind::EpsDependent) out.value += params_.epsilon * params_.epsilon * c1;
    }
    return out;
  }

  Vec19 point_residual(const Stencil& self, const Stencil* background) const {
    return a_ * self.dt + b_ * self.ds + source_eval(self, background).value;
  }

  struct BoundaryLeft {
    Eigen::Matrix<double, left_rows, 1> resid;
    Eigen::Matrix<double, left_rows, m> jac;
  };
  struct BoundaryRight {
    Eigen::Matrix<double, right_rows, 1> resid;
    Eigen::Matrix<double, right_rows, m> jac_inner, jac_last;
  };

  BoundaryLeft boundary_left(const Vec19& new0, const Vec19& /*old0*/, const Vec19*,
                             const Vec19*, const GridSpec&) const {
    BoundaryLeft out;
    out.resid.setZero();
    out.jac.setZero();
    Vec19 target = Vec19::Zero();
    if (kind_ != SystemKind::Correction)
      target.segment<4>(spatial_idx::q) = planar_quaternion(0.0);
    int r = 0;
    for (int c = spatial_idx::r; c < spatial_idx::r + 3; ++c) clamp(out, r, c, new0, target);
    for (int c = spatial_idx::q; c < spatial_idx::q + 4; ++c) clamp(out, r, c, new0, target);
    for (int c = spatial_idx::v; c < spatial_idx::v + 3; ++c) clamp(out, r, c, new0, target);
    for (int c = spatial_idx::omega; c < spatial_idx::omega + 3; ++c)
      clamp(out, r, c, new0, target);
    return out;
  }

  BoundaryRight boundary_right(const Vec19&, const Vec19& new_last, const Vec19&, const Vec19&,
                               const Vec19*, const Vec19*, const Vec19*, const Vec19*,
                               const GridSpec&) const {
    BoundaryRight out;
    out.resid.setZero();
    out.jac_inner.setZero();
    out.jac_last.setZero();
    int r = 0;
    for (int c = spatial_idx::n; c < spatial_idx::n + 3; ++c) {
      out.resid[r] = new_last[c];
      out.jac_last(r, c) = 1.0;
      ++r;
    }
    for (int c = spatial_idx::kappa; c < spatial_idx::kappa + 3; ++c) {
      out.resid[r] = new_last[c];
      out.jac_last(r, c) = 1.0;
      ++r;
    }
    return out;
  }

  StateField initial_state(const GridSpec& grid) const {
    grid.validate();
    StateField f(m, grid.n_cells + 1);
    if (kind_ == SystemKind::Correction) return f;
    const StateField planar = initial_state_planar(grid);
    for (int i = 0; i <= grid.n_cells; ++i) {
      const Vec9 node = planar.node(i);
      f.node(i) = embed_planar(node);
    }
    return f;
  }

  // Quaternions drift from unit length only through solver round-off; pull
  // them back after each accepted step. Correction states are tangents, not
  // rotations, and stay untouched.
  void normalize_state(StateField& f) const {
    if (kind_ == SystemKind::Correction) return;
    for (int i = 0; i < f.n_nodes(); ++i) {
      auto node = f.node(i);
      const double nrm = node.segment<4>(spatial_idx::q).norm();
      if (nrm > 0.0) node.segment<4>(spatial_idx::q) /= nrm;
    }
  }

 private:
  template <class Out>
  static void clamp(Out& out, int& r, int comp, const Vec19& value, const Vec19& target) {
    out.resid[r] = value[comp] - target[comp];
    out.jac(r, comp) = 1.0;
    ++r;
  }

  Mat19 source_jacobian_3d_folded(const Vec19& phi) const {
    MatX j0, j1;
    detail3d::source_jacobian_blocks_3d(Variant::S, params_, phi, &j0,
                                        kind_ == SystemKind::EpsDependent ? &j1 : nullptr);
    if (kind_ == SystemKind::EpsDependent) return j0 + params_.epsilon * params_.epsilon * j1;
    return j0;
  }

  Parameters params_;
  SystemKind kind_;
  SpatialSplit split_;
  Mat19 a_, b_;
};

}  // namespace cosserat

#endif  // COSSERAT_SPATIAL_HPP
