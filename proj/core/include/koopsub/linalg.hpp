#pragma once

#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace koopsub {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Numerical tolerances shared by every algorithm in the library.
//
//  rank_rtol   singular values at or below rank_rtol * sigma_1 * max(rows, cols)
//              count as zero when deciding rank.
//  eps_cap     energy fraction for truncating singular values when computing
//              null spaces for range intersections and inside SSD.
//  eps_approx  the same truncation parameter for the approximated SSD variant.
struct Tolerances {
  double rank_rtol = 1e-12;
  double eps_cap = 1e-12;
  double eps_approx = 1e-3;

  // Throws InvalidInput unless all three are finite and strictly positive.
  void validate() const;
};

struct SvdResult {
  Matrix left;            // m x l
  Vector singular_values; // l, non-increasing
  Matrix right;           // n x l
};

// Either a matrix with full column rank or the zero subspace of a given
// ambient dimension. The zero marker is explicit: it has no matrix and zero
// columns, and it is never confused with an ambient x 0 matrix.
class ColumnBasis {
 public:
  ColumnBasis() = default;

  // A matrix with no columns becomes the zero marker.
  explicit ColumnBasis(Matrix m);

  static ColumnBasis zero(Index ambient_dim);
  static ColumnBasis identity(Index n);

  bool is_zero() const noexcept { return !matrix_.has_value(); }
  Index ambient_dim() const noexcept { return ambient_; }
  Index cols() const noexcept { return matrix_ ? matrix_->cols() : 0; }

  // Throws InvalidInput for the zero marker.
  const Matrix& matrix() const;

  friend bool operator==(const ColumnBasis& a, const ColumnBasis& b);

 private:
  Index ambient_ = 0;
  std::optional<Matrix> matrix_;
};

using CoefficientMatrix = ColumnBasis;

namespace linalg {

// Throws InvalidMatrix if any entry is NaN or infinite.
void require_finite(const Matrix& a, std::string_view what);

// Thin SVD with non-increasing singular values. Column signs follow the
// convention of normalize_signs applied to the right singular vectors.
SvdResult svd(const Matrix& a);

// Singular values only.
Vector singular_values(const Matrix& a);

double rank_threshold(const Vector& sv, Index max_dim, const Tolerances& tol);

Index numerical_rank(const Vector& sv, Index max_dim, const Tolerances& tol);

// 1-based minimum k with sum_{j>=k} sigma_j^2 <= eps * sum_j sigma_j^2.
// Singular values k..l are then treated as zero; k == l + 1 truncates nothing.
Index truncation_index(const Vector& sv, double eps);

// Orthonormal basis of the numerical null space of `a`. When `energy_eps` is
// set, the energy truncation rule is applied on top of the rank threshold.
// `rank_dim` replaces max(rows, cols) in the rank threshold; callers working
// on a row-compressed factor pass the row count of the original matrix.
ColumnBasis null_space_basis(const Matrix& a, const Tolerances& tol,
                             std::optional<double> energy_eps = std::nullopt,
                             std::optional<Index> rank_dim = std::nullopt);

// Orthonormal basis of R(a) (left singular vectors above the rank threshold).
ColumnBasis orthonormal_basis(const Matrix& a, const Tolerances& tol);
ColumnBasis orthonormal_basis(const ColumnBasis& a, const Tolerances& tol);

// Basis of R(A) ∩ R(B) from the eps_cap-truncated null space of [A, B].
// Inputs must be zero or have full column rank.
ColumnBasis range_intersection_basis(const ColumnBasis& a, const ColumnBasis& b,
                                     const Tolerances& tol);

// Left fold of range_intersection_basis. A single element is returned
// re-orthonormalized.
ColumnBasis multi_intersection_basis(std::span<const ColumnBasis> mats,
                                     const Tolerances& tol);

// Spectral norm of the difference of the orthogonal projectors onto R(a) and
// R(b): 0 for equal ranges, 1 when the dimensions differ.
double subspace_distance(const ColumnBasis& a, const ColumnBasis& b,
                         const Tolerances& tol = {});

bool range_equal(const ColumnBasis& a, const ColumnBasis& b, double tol);

// ||(I - P_outer) Q_inner||_2 for an orthonormal basis Q_inner of R(inner).
// Zero means R(inner) ⊆ R(outer).
double containment_residual(const ColumnBasis& inner, const ColumnBasis& outer,
                            const Tolerances& tol = {});

Matrix pseudo_inverse(const Matrix& a, const Tolerances& tol = {});

// Minimum-norm least-squares solution X of A X ≈ B, i.e. pinv(A) * B.
Matrix least_squares(const Matrix& a, const Matrix& b, const Tolerances& tol = {});

// Flip each column so that its largest-magnitude entry (first on ties) is
// positive.
void normalize_signs(Matrix& m);

}  // namespace linalg
}  // namespace koopsub
