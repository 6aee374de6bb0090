// core.hpp
//
// Shared domain types for the rod solver: physical parameters, system
// selection tags, space-time grid, nodal state fields, and the small
// planar-geometry helpers used throughout.

#ifndef COSSERAT_CORE_HPP
#define COSSERAT_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cosserat {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec4 = Eigen::Vector4d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Dimensionless parameters of the scaled rod model.
//   epsilon : slenderness (diameter over length), >= 0
//   mu      : Mach number over slenderness, kept constant in the limit
//   a       : extension-to-shear stiffness ratio, a = 2(1+nu)
//   froude  : inertia-to-gravity ratio
// `gravity` switches the external force off entirely (instead of Fr -> inf),
// so the straight rest state stays an exact equilibrium in tests.
struct Parameters {
  double epsilon = 0.0;
  double mu = 10.0;
  double a = 2.5;
  double froude = 1.0;
  bool gravity = true;

  static double shear_ratio_from_nu(double nu) { return 2.0 * (1.0 + nu); }

  void validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
      throw std::invalid_argument("Parameters: epsilon must be >= 0");
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw std::invalid_argument("Parameters: mu must be > 0");
    if (!(a >= 2.0 && a < 3.0))
      throw std::invalid_argument("Parameters: a must lie in [2, 3)");
    if (!(froude > 0.0) || !std::isfinite(froude))
      throw std::invalid_argument("Parameters: froude must be > 0");
  }

  // Gravitational force density in the outer basis, f = -Fr^{-2} e_2.
  double force_e2() const { return gravity ? -1.0 / (froude * froude) : 0.0; }
};

// Which system a residual describes. Limit and Correction never read epsilon.
enum class SystemKind { EpsDependent, Limit, Correction };

// Model formulation: which six of the kinematic/geometric/compatibility
// equations accompany the two balance laws.
enum class Variant { M, T, S };

inline const char* to_string(SystemKind k) {
  switch (k) {
    case SystemKind::EpsDependent: return "eps";
    case SystemKind::Limit: return "limit";
    case SystemKind::Correction: return "correction";
  }
  return "?";
}

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::M: return "M";
    case Variant::T: return "T";
    case Variant::S: return "S";
  }
  return "?";
}

// Equidistant grid on s in [0,1] with fixed time step and the temporal
// tuning parameter lambda in [0.5, 1] (0.5 = midpoint rule, 1 = implicit
// Euler).
struct GridSpec {
  int n_cells = 100;
  double dt = 1e-2;
  double lambda = 1.0;

  double ds() const { return 1.0 / static_cast<double>(n_cells); }

  void validate() const {
    if (n_cells < 2) throw std::invalid_argument("GridSpec: need at least 2 cells");
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw std::invalid_argument("GridSpec: dt must be > 0");
    if (!(lambda >= 0.5 && lambda <= 1.0))
      throw std::invalid_argument("GridSpec: lambda must lie in [0.5, 1]");
  }
};

// Nodal unknowns at one time level: (N+1) vectors of length m, node-major.
// Planar ordering (m = 9): (r1, r2, alpha, v1, v3, n1, n3, omega, kappa).
class StateField {
 public:
  StateField() = default;
  StateField(int unknowns, int n_nodes)
      : m_(unknowns), data_(VecX::Zero(static_cast<Eigen::Index>(unknowns) * n_nodes)) {
    if (unknowns < 1 || n_nodes < 2)
      throw std::invalid_argument("StateField: invalid dimensions");
  }

  int unknowns() const { return m_; }
  int n_nodes() const { return m_ == 0 ? 0 : static_cast<int>(data_.size()) / m_; }

  Eigen::Ref<VecX> node(int i) { return data_.segment(static_cast<Eigen::Index>(i) * m_, m_); }
  Eigen::Ref<const VecX> node(int i) const {
    return data_.segment(static_cast<Eigen::Index>(i) * m_, m_);
  }

  VecX& data() { return data_; }
  const VecX& data() const { return data_; }

  bool all_finite() const { return data_.allFinite(); }

  bool same_layout(const StateField& other) const {
    return m_ == other.m_ && data_.size() == other.data_.size();
  }

 private:
  int m_ = 0;
  VecX data_;
};

inline StateField operator-(const StateField& a, const StateField& b) {
  if (!a.same_layout(b)) throw std::invalid_argument("StateField: layout mismatch");
  StateField out = a;
  out.data() -= b.data();
  return out;
}

inline StateField operator+(const StateField& a, const StateField& b) {
  if (!a.same_layout(b)) throw std::invalid_argument("StateField: layout mismatch");
  StateField out = a;
  out.data() += b.data();
  return out;
}

inline StateField operator*(double c, const StateField& a) {
  StateField out = a;
  out.data() *= c;
  return out;
}

// Planar rotation between outer and director components,
//   D(alpha) = [ -sin a  cos a ]
//              [  cos a  sin a ].
// Symmetric, orthogonal and an involution (D*D = I), det = -1.
inline Mat2 rotation2d(double alpha) {
  const double s = std::sin(alpha), c = std::cos(alpha);
  Mat2 d;
  d << -s, c, c, s;
  return d;
}

// d/dalpha of rotation2d.
inline Mat2 rotation2d_deriv(double alpha) {
  const double s = std::sin(alpha), c = std::cos(alpha);
  Mat2 d;
  d << -c, -s, -s, c;
  return d;
}

// (z1, z3) -> (-z3, z1), the in-plane perpendicular of a director tuple.
inline Vec2 perp(const Vec2& z) { return Vec2(-z[1], z[0]); }

namespace detail {
inline void check_grid_length(int n_nodes, double ds) {
  if (n_nodes < 2) throw std::invalid_argument("l2_norm: need at least 2 nodes");
  if (std::abs(ds * (n_nodes - 1) - 1.0) > 1e-10)
    throw std::invalid_argument("l2_norm: node count does not match cell size on [0,1]");
}
}  // namespace detail

// Composite-trapezoid L2(0,1) norm of a nodal scalar sequence.
inline double l2_norm(const std::vector<double>& values, double ds) {
  detail::check_grid_length(static_cast<int>(values.size()), ds);
  double acc = 0.0;
  const int n = static_cast<int>(values.size());
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * values[i] * values[i];
  }
  return std::sqrt(acc * ds);
}

// Same norm for a vector-valued field: per-node Euclidean norm squared under
// the trapezoid rule.
inline double l2_norm(const StateField& field, double ds) {
  detail::check_grid_length(field.n_nodes(), ds);
  double acc = 0.0;
  const int n = field.n_nodes();
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * field.node(i).squaredNorm();
  }
  return std::sqrt(acc * ds);
}

}  // namespace cosserat

#endif  // COSSERAT_CORE_HPP
