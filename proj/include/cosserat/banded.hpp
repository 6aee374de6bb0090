// banded.hpp
//
// Band storage for the block-structured collocation Jacobian and a direct
// banded LU solver with partial pivoting confined to the band. Pivoting may
// fill up to `lower` extra superdiagonals, which the storage reserves up
// front (LAPACK-style layout). A dense solve built on Eigen is kept as the
// reference path for small systems.

#ifndef COSSERAT_BANDED_HPP
#define COSSERAT_BANDED_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cosserat/core.hpp"

namespace cosserat {

struct SingularMatrixError : std::runtime_error {
  explicit SingularMatrixError(int pivot)
      : std::runtime_error("singular matrix at pivot index " + std::to_string(pivot)),
        pivot_index(pivot) {}
  int pivot_index;
};

class BandedMatrix {
 public:
  BandedMatrix(int dim, int lower, int upper)
      : n_(dim), kl_(lower), ku_(upper), ldab_(2 * lower + upper + 1),
        ab_(static_cast<std::size_t>(ldab_) * dim, 0.0) {
    if (dim < 1 || lower < 0 || upper < 0)
      throw std::invalid_argument("BandedMatrix: invalid dimensions");
  }

  int dim() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  bool in_band(int i, int j) const { return i - j <= kl_ && j - i <= ku_; }

  double& at(int i, int j) {
    assert(in_band(i, j));
    return ab_[index(i, j)];
  }

  void add(int i, int j, double v) { at(i, j) += v; }

  double get(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || !in_band(i, j)) return 0.0;
    return ab_[index(i, j)];
  }

  void set_zero() { std::fill(ab_.begin(), ab_.end(), 0.0); }

  MatX dense() const {
    MatX a = MatX::Zero(n_, n_);
    for (int j = 0; j < n_; ++j)
      for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i)
        a(i, j) = ab_[index(i, j)];
    return a;
  }

  VecX multiply(const VecX& x) const {
    if (x.size() != n_) throw std::invalid_argument("BandedMatrix: size mismatch");
    VecX y = VecX::Zero(n_);
    for (int j = 0; j < n_; ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i)
        y[i] += ab_[index(i, j)] * xj;
    }
    return y;
  }

 private:
  friend class BandedLu;

  // Column-major LAPACK band layout: entry (i,j) lives at row kl+ku+i-j of
  // column j. Rows [0, kl) of each column hold the pivoting fill.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j);
  }

  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
};

// LU factorization of a banded matrix with row partial pivoting. The factored
// upper bandwidth grows to lower+upper.
class BandedLu {
 public:
  explicit BandedLu(const BandedMatrix& a)
      : n_(a.dim()), kl_(a.lower()), kw_(a.lower() + a.upper()), work_(a), piv_(a.dim()) {
    factor();
  }

  VecX solve(const VecX& b) const {
    if (b.size() != n_) throw std::invalid_argument("BandedLu: rhs size mismatch");
    VecX x = b;
    // forward substitution with the recorded row interchanges
    for (int j = 0; j < n_; ++j) {
      if (piv_[j] != j) std::swap(x[j], x[piv_[j]]);
      const double xj = x[j];
      if (xj == 0.0) continue;
      const int iend = std::min(n_ - 1, j + kl_);
      for (int i = j + 1; i <= iend; ++i) x[i] -= entry(i, j) * xj;
    }
    // back substitution on U (bandwidth kl+ku after fill)
    for (int j = n_ - 1; j >= 0; --j) {
      x[j] /= entry(j, j);
      const double xj = x[j];
      const int ibeg = std::max(0, j - kw_);
      for (int i = ibeg; i < j; ++i) x[i] -= entry(i, j) * xj;
    }
    return x;
  }

 private:
  double& entry(int i, int j) { return work_.ab_[work_.index(i, j)]; }
  double entry(int i, int j) const { return work_.ab_[work_.index(i, j)]; }

  void factor() {
    for (int j = 0; j < n_; ++j) {
      const int ilast = std::min(n_ - 1, j + kl_);
      int p = j;
      double pmax = std::abs(entry(j, j));
      for (int i = j + 1; i <= ilast; ++i) {
        const double v = std::abs(entry(i, j));
        if (v > pmax) {
          pmax = v;
          p = i;
        }
      }
      piv_[j] = p;
      if (pmax == 0.0) throw SingularMatrixError(j);
      const int clast = std::min(n_ - 1, j + kw_);
      if (p != j)
        for (int c = j; c <= clast; ++c) std::swap(entry(p, c), entry(j, c));
      const double d = entry(j, j);
      for (int i = j + 1; i <= ilast; ++i) {
        const double l = entry(i, j) / d;
        entry(i, j) = l;
        if (l == 0.0) continue;
        for (int c = j + 1; c <= clast; ++c) entry(i, c) -= l * entry(j, c);
      }
    }
  }

  int n_, kl_, kw_;
  BandedMatrix work_;
  std::vector<int> piv_;
};

inline VecX banded_lu_solve(const BandedMatrix& a, const VecX& b) {
  return BandedLu(a).solve(b);
}

// Dense reference solve (partial-pivot LU via Eigen).
inline VecX dense_lu_solve(const MatX& a, const VecX& b) {
  Eigen::PartialPivLU<MatX> lu(a);
  return lu.solve(b);
}

}  // namespace cosserat

#endif  // COSSERAT_BANDED_HPP
