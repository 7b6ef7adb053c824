#include "koopsub/ssd.hpp"

#include <string>

#include "koopsub/errors.hpp"
#include "koopsub/flops.hpp"

namespace koopsub {

namespace {

// Replaces [a, b] by the triangular factor of a Householder QR when that
// shrinks the row count.
void recompress(Matrix& a, Matrix& b) {
  const Index c = a.cols();
  if (a.rows() <= 2 * c) return;
  Matrix stacked(a.rows(), 2 * c);
  stacked << a, b;
  Eigen::HouseholderQR<Matrix> qr(stacked);
  flops::add(flops::householder_qr(stacked.rows(), stacked.cols()));
  const Matrix r = qr.matrixQR().topRows(2 * c).triangularView<Eigen::Upper>();
  a = r.leftCols(c);
  b = r.rightCols(c);
}

void check_pair(const Matrix& dx, const Matrix& dy) {
  if (dx.rows() != dy.rows() || dx.cols() != dy.cols()) {
    throw Error(ErrorCode::invalid_input, "ssd: DX and DY must have the same shape");
  }
  if (dx.rows() == 0 || dx.cols() == 0) throw Error(ErrorCode::invalid_input, "ssd: empty data");
  linalg::require_finite(dx, "ssd");
  linalg::require_finite(dy, "ssd");
}

}  // namespace

CompressedPair compress(const Matrix& dx, const Matrix& dy) {
  check_pair(dx, dy);
  CompressedPair out{dx, dy, dx.rows()};
  recompress(out.ax, out.ay);
  return out;
}

SsdResult ssd_compressed(const CompressedPair& data, const Tolerances& tol, double energy_eps) {
  const Index nd = data.ax.cols();
  for (const Matrix* m : {&data.ax, &data.ay}) {
    const Vector sv = linalg::singular_values(*m);
    if (linalg::numerical_rank(sv, std::max(data.data_rows, nd), tol) != nd) {
      throw Error(ErrorCode::precondition_violation, "ssd: DX and DY must have full column rank");
    }
  }

  SsdResult res;
  Matrix c = Matrix::Identity(nd, nd);
  Matrix a = data.ax;
  Matrix b = data.ay;
  // Each reduction removes at least one column, so nd + 1 passes suffice.
  for (Index pass = 0; pass <= nd + 1; ++pass) {
    const Index cols = a.cols();
    // The null space of [A, B] is taken through orthonormal bases of R(A) and
    // R(B): with A = U_A S_A W_A^T, a null vector (y_a, y_b) of [U_A, U_B]
    // maps to Z^A = W_A S_A^{-1} y_a. The singular values of [U_A, U_B] depend
    // only on the principal angles between R(A) and R(B), so the truncation
    // rule does not depend on the scale of the data.
    const SvdResult sa = linalg::svd(a);
    const SvdResult sb = linalg::svd(b);
    Matrix stacked(a.rows(), 2 * cols);
    stacked << sa.left, sb.left;
    const ColumnBasis z = linalg::null_space_basis(stacked, tol, energy_eps);
    if (z.is_zero()) {
      res.trace.reason = SsdTermination::null_empty;
      res.trace.final_null_dim = 0;
      res.c = CoefficientMatrix::zero(nd);
      return res;
    }
    const Index q = z.cols();
    if (cols <= q) {
      res.trace.reason = SsdTermination::size_check;
      res.trace.final_null_dim = q;
      res.trace.size_check_excess = q - cols;
      res.c = CoefficientMatrix(std::move(c));
      return res;
    }
    Matrix ya = z.matrix().topRows(cols);
    const ColumnBasis ya_range = linalg::orthonormal_basis(ya, tol);
    if (ya_range.is_zero()) {
      res.trace.rank_repaired = true;
      res.trace.reason = SsdTermination::null_empty;
      res.c = CoefficientMatrix::zero(nd);
      return res;
    }
    if (ya_range.cols() < q) {
      res.trace.rank_repaired = true;
      ya = ya_range.matrix();
    }
    // Z^A is replaced by an orthonormal basis of its range. The ranges of C,
    // A and B are unchanged while C stays orthonormal across reductions.
    const Matrix za_raw = sa.right * (sa.singular_values.cwiseInverse().asDiagonal() * ya);
    const Index kept = za_raw.cols();
    Eigen::HouseholderQR<Matrix> qr(za_raw);
    const Matrix za = qr.householderQ() * Matrix::Identity(cols, kept);
    flops::add(flops::gemm(cols, cols, kept) + 2 * flops::householder_qr(cols, kept));
    c = c * za;
    a = a * za;
    b = b * za;
    flops::add(flops::gemm(nd, cols, kept) + 2 * flops::gemm(a.rows(), cols, kept));
    recompress(a, b);
    res.trace.iterations.push_back({q, kept});
  }
  throw Error(ErrorCode::internal_error,
              "ssd: no termination after " + std::to_string(nd + 2) + " passes");
}

SsdResult ssd(const Matrix& dx, const Matrix& dy, const Tolerances& tol) {
  return ssd_compressed(compress(dx, dy), tol, tol.eps_cap);
}

SsdResult approx_ssd(const Matrix& dx, const Matrix& dy, double eps_approx, const Tolerances& tol) {
  if (!(eps_approx > 0.0)) throw Error(ErrorCode::invalid_input, "approx_ssd: eps must be positive");
  return ssd_compressed(compress(dx, dy), tol, eps_approx);
}

Matrix ssd_reduced_operator(const Matrix& dx, const Matrix& dy, const CoefficientMatrix& c,
                            const Tolerances& tol) {
  if (c.is_zero()) throw Error(ErrorCode::invalid_input, "ssd_reduced_operator: zero coefficient matrix");
  check_pair(dx, dy);
  const Matrix ax = dx * c.matrix();
  const Matrix ay = dy * c.matrix();
  return linalg::least_squares(ax, ay, tol);
}

}  // namespace koopsub
