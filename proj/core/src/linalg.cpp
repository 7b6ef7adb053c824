#include "koopsub/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "koopsub/errors.hpp"
#include "koopsub/flops.hpp"

namespace koopsub {

void Tolerances::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(rank_rtol) || !ok(eps_cap) || !ok(eps_approx)) {
    throw Error(ErrorCode::invalid_input,
                "tolerances must be finite and strictly positive");
  }
}

ColumnBasis::ColumnBasis(Matrix m) : ambient_(m.rows()) {
  if (m.cols() > 0) matrix_ = std::move(m);
}

ColumnBasis ColumnBasis::zero(Index ambient_dim) {
  ColumnBasis b;
  b.ambient_ = ambient_dim;
  return b;
}

ColumnBasis ColumnBasis::identity(Index n) {
  return ColumnBasis(Matrix::Identity(n, n));
}

const Matrix& ColumnBasis::matrix() const {
  if (!matrix_) throw Error(ErrorCode::invalid_input, "zero subspace has no basis matrix");
  return *matrix_;
}

bool operator==(const ColumnBasis& a, const ColumnBasis& b) {
  if (a.ambient_ != b.ambient_ || a.is_zero() != b.is_zero()) return false;
  if (a.is_zero()) return true;
  return a.matrix_->rows() == b.matrix_->rows() && a.matrix_->cols() == b.matrix_->cols() &&
         *a.matrix_ == *b.matrix_;
}

namespace linalg {

namespace {

// One-sided Jacobi SVD. The divide and conquer solver of Eigen 3.4.0 returns
// NaN on inputs with many repeated singular values, such as stacked
// orthonormal bases in range intersections.
using Svd = Eigen::JacobiSVD<Matrix>;

struct RightFactor {
  Vector sv;  // min(m, n) values, non-increasing
  Matrix v;   // n x n
};

void require_nonempty(const Matrix& a, std::string_view what) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw Error(ErrorCode::invalid_input, std::string(what) + ": empty matrix");
  }
}

// Singular values and the full right factor. Tall inputs are reduced to their
// triangular QR factor first; both share singular values and V.
RightFactor right_factor(const Matrix& a) {
  const Index m = a.rows(), n = a.cols();
  RightFactor out;
  if (m > n) {
    Eigen::HouseholderQR<Matrix> qr(a);
    flops::add(flops::householder_qr(m, n));
    const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    Svd s(r, Eigen::ComputeFullV);
    flops::add(flops::svd(n, n, false));
    out.sv = s.singularValues();
    out.v = s.matrixV();
  } else {
    Svd s(a, Eigen::ComputeFullV);
    flops::add(flops::svd(m, n, false) + flops::gemm(n, n, n - m));
    out.sv = s.singularValues();
    out.v = s.matrixV();
  }
  return out;
}

ColumnBasis require_full_rank_basis(const ColumnBasis& a, const Tolerances& tol,
                                    std::string_view what) {
  if (a.is_zero()) return a;
  ColumnBasis q = orthonormal_basis(a.matrix(), tol);
  if (q.cols() != a.cols()) {
    throw Error(ErrorCode::precondition_violation,
                std::string(what) + ": input is rank deficient (rank " +
                    std::to_string(q.cols()) + " < " + std::to_string(a.cols()) + ")");
  }
  return q;
}

// Spectral norm of (I - Q_b Q_b^T) Q_a for orthonormal Q_a, Q_b.
double projection_residual(const Matrix& qa, const Matrix& qb) {
  const Matrix coeff = qb.transpose() * qa;
  const Matrix resid = qa - qb * coeff;
  flops::add(2 * flops::gemm(qb.cols(), qb.rows(), qa.cols()));
  return singular_values(resid)(0);
}

}  // namespace

void require_finite(const Matrix& a, std::string_view what) {
  if (!a.allFinite()) {
    throw Error(ErrorCode::invalid_matrix, std::string(what) + ": non-finite entries");
  }
}

void normalize_signs(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < m.rows(); ++i) {
      const double v = std::abs(m(i, j));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (m.rows() > 0 && m(best, j) < 0.0) m.col(j) *= -1.0;
  }
}

SvdResult svd(const Matrix& a) {
  require_nonempty(a, "svd");
  require_finite(a, "svd");
  const Index m = a.rows(), n = a.cols();
  SvdResult out;
  if (m > 2 * n) {
    Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    Svd s(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Matrix u = Matrix::Zero(m, n);
    u.topRows(n) = s.matrixU();
    u.applyOnTheLeft(qr.householderQ());
    flops::add(flops::householder_qr(m, n) + flops::svd(n, n, true) +
               flops::householder_qr(m, n));
    out.left = std::move(u);
    out.singular_values = s.singularValues();
    out.right = s.matrixV();
  } else {
    Svd s(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    flops::add(flops::svd(m, n, true));
    out.left = s.matrixU();
    out.singular_values = s.singularValues();
    out.right = s.matrixV();
  }
  // Joint sign convention keeps U * diag(s) * V^T intact.
  for (Index j = 0; j < out.right.cols(); ++j) {
    Index best = 0;
    for (Index i = 1; i < out.right.rows(); ++i) {
      if (std::abs(out.right(i, j)) > std::abs(out.right(best, j))) best = i;
    }
    if (out.right(best, j) < 0.0) {
      out.right.col(j) *= -1.0;
      out.left.col(j) *= -1.0;
    }
  }
  return out;
}

Vector singular_values(const Matrix& a) {
  require_nonempty(a, "singular_values");
  require_finite(a, "singular_values");
  const Index m = a.rows(), n = a.cols();
  if (m > 2 * n) {
    Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    flops::add(flops::householder_qr(m, n) + 4 * n * n * n);
    return Svd(r).singularValues();
  }
  flops::add(4 * std::max(m, n) * std::min(m, n) * std::min(m, n));
  return Svd(a).singularValues();
}

double rank_threshold(const Vector& sv, Index max_dim, const Tolerances& tol) {
  if (sv.size() == 0) return 0.0;
  return tol.rank_rtol * sv(0) * static_cast<double>(max_dim);
}

Index numerical_rank(const Vector& sv, Index max_dim, const Tolerances& tol) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double thresh = rank_threshold(sv, max_dim, tol);
  Index r = 0;
  for (Index j = 0; j < sv.size(); ++j) {
    if (sv(j) > thresh) ++r;
  }
  return r;
}

Index truncation_index(const Vector& sv, double eps) {
  const Index l = sv.size();
  if (l == 0) throw Error(ErrorCode::invalid_input, "truncation_index: empty singular value list");
  // Suffix energies accumulated from the smallest value upward.
  Vector tail(l + 1);
  tail(l) = 0.0;
  for (Index j = l - 1; j >= 0; --j) tail(j) = tail(j + 1) + sv(j) * sv(j);
  const double bound = eps * tail(0);
  for (Index k = 0; k <= l; ++k) {
    if (tail(k) <= bound) return k + 1;
  }
  return l + 1;
}

ColumnBasis null_space_basis(const Matrix& a, const Tolerances& tol,
                             std::optional<double> energy_eps, std::optional<Index> rank_dim) {
  require_nonempty(a, "null_space_basis");
  require_finite(a, "null_space_basis");
  const Index n = a.cols();
  RightFactor f = right_factor(a);
  Index rank = numerical_rank(f.sv, rank_dim.value_or(std::max(a.rows(), n)), tol);
  if (energy_eps && rank > 0) rank = std::min(rank, truncation_index(f.sv, *energy_eps) - 1);
  if (rank >= n) return ColumnBasis::zero(n);
  Matrix z = f.v.rightCols(n - rank);
  normalize_signs(z);
  return ColumnBasis(std::move(z));
}

ColumnBasis orthonormal_basis(const Matrix& a, const Tolerances& tol) {
  require_nonempty(a, "orthonormal_basis");
  if (a.rows() == a.cols() && a.isIdentity(0.0)) return ColumnBasis(a);
  SvdResult s = svd(a);
  const Index r = numerical_rank(s.singular_values, std::max(a.rows(), a.cols()), tol);
  if (r == 0) return ColumnBasis::zero(a.rows());
  Matrix q = s.left.leftCols(r);
  normalize_signs(q);
  return ColumnBasis(std::move(q));
}

ColumnBasis orthonormal_basis(const ColumnBasis& a, const Tolerances& tol) {
  if (a.is_zero()) return a;
  return orthonormal_basis(a.matrix(), tol);
}

ColumnBasis range_intersection_basis(const ColumnBasis& a, const ColumnBasis& b,
                                     const Tolerances& tol) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw Error(ErrorCode::invalid_input, "range_intersection_basis: ambient dimension mismatch");
  }
  const Index n = a.ambient_dim();
  const ColumnBasis qa = require_full_rank_basis(a, tol, "range_intersection_basis");
  const ColumnBasis qb = require_full_rank_basis(b, tol, "range_intersection_basis");
  if (qa.is_zero() || qb.is_zero()) return ColumnBasis::zero(n);
  if (qa.cols() == n) return qb;
  if (qb.cols() == n) return qa;

  Matrix stacked(n, qa.cols() + qb.cols());
  stacked << qa.matrix(), qb.matrix();
  const ColumnBasis z = null_space_basis(stacked, tol, tol.eps_cap);
  if (z.is_zero()) return ColumnBasis::zero(n);
  const Matrix w = qa.matrix() * z.matrix().topRows(qa.cols());
  flops::add(flops::gemm(n, qa.cols(), z.cols()));
  return orthonormal_basis(w, tol);
}

ColumnBasis multi_intersection_basis(std::span<const ColumnBasis> mats, const Tolerances& tol) {
  if (mats.empty()) throw Error(ErrorCode::invalid_input, "multi_intersection_basis: empty list");
  const Index n = mats.front().ambient_dim();
  for (const auto& m : mats) {
    if (m.ambient_dim() != n) {
      throw Error(ErrorCode::invalid_input, "multi_intersection_basis: ambient dimension mismatch");
    }
    if (m.is_zero()) return ColumnBasis::zero(n);
  }
  ColumnBasis acc = require_full_rank_basis(mats.front(), tol, "multi_intersection_basis");
  for (std::size_t i = 1; i < mats.size() && !acc.is_zero(); ++i) {
    acc = range_intersection_basis(acc, mats[i], tol);
  }
  return acc;
}

double subspace_distance(const ColumnBasis& a, const ColumnBasis& b, const Tolerances& tol) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  if (a.is_zero() || b.is_zero()) return 1.0;
  const ColumnBasis qa = orthonormal_basis(a, tol);
  const ColumnBasis qb = orthonormal_basis(b, tol);
  if (qa.cols() != qb.cols()) return 1.0;
  if (qa.is_zero()) return 0.0;
  return projection_residual(qa.matrix(), qb.matrix());
}

bool range_equal(const ColumnBasis& a, const ColumnBasis& b, double tol) {
  return subspace_distance(a, b) < tol;
}

double containment_residual(const ColumnBasis& inner, const ColumnBasis& outer,
                            const Tolerances& tol) {
  if (inner.is_zero()) return 0.0;
  if (outer.is_zero()) return 1.0;
  const ColumnBasis qi = orthonormal_basis(inner, tol);
  const ColumnBasis qo = orthonormal_basis(outer, tol);
  if (qi.is_zero()) return 0.0;
  if (qo.is_zero()) return 1.0;
  return projection_residual(qi.matrix(), qo.matrix());
}

Matrix pseudo_inverse(const Matrix& a, const Tolerances& tol) {
  const SvdResult s = svd(a);
  const Index r = numerical_rank(s.singular_values, std::max(a.rows(), a.cols()), tol);
  Matrix out = Matrix::Zero(a.cols(), a.rows());
  if (r == 0) return out;
  out = s.right.leftCols(r) *
        s.singular_values.head(r).cwiseInverse().asDiagonal() *
        s.left.leftCols(r).transpose();
  flops::add(flops::gemm(a.cols(), r, a.rows()));
  return out;
}

Matrix least_squares(const Matrix& a, const Matrix& b, const Tolerances& tol) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::invalid_input, "least_squares: row count mismatch");
  }
  require_finite(b, "least_squares");
  const SvdResult s = svd(a);
  const Index r = numerical_rank(s.singular_values, std::max(a.rows(), a.cols()), tol);
  if (r == 0) return Matrix::Zero(a.cols(), b.cols());
  const Matrix proj = s.left.leftCols(r).transpose() * b;
  flops::add(flops::gemm(r, a.rows(), b.cols()) + flops::gemm(a.cols(), r, b.cols()));
  return s.right.leftCols(r) * (s.singular_values.head(r).cwiseInverse().asDiagonal() * proj);
}

}  // namespace linalg
}  // namespace koopsub
