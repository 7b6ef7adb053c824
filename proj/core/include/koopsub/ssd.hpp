#pragma once

#include <optional>
#include <vector>

#include "koopsub/linalg.hpp"

namespace koopsub {

struct SsdIteration {
  Index null_dim = 0;      // columns of the null-space basis of [A_i, B_i]
  Index reduced_cols = 0;  // columns of the accumulator after the reduction
};

enum class SsdTermination { null_empty, size_check };

struct SsdTrace {
  std::vector<SsdIteration> iterations;  // one record per reduction
  SsdTermination reason = SsdTermination::size_check;
  Index final_null_dim = 0;
  // #cols(Z^A) - #rows(Z^A) when the size check fires; positive values mean
  // the null space had more directions than the current subspace.
  Index size_check_excess = 0;
  // Set when a null-space block Z^A came out numerically rank deficient and
  // was replaced by an orthonormal basis of its range.
  bool rank_repaired = false;
};

struct SsdResult {
  CoefficientMatrix c;
  SsdTrace trace;
};

// Row compression of a data pair: [DX, DY] = Q [ax, ay] with Q having
// orthonormal columns. Null spaces and singular values of [DX C, DY C] equal
// those of [ax C, ay C] for every C, so SSD can run on the small factor.
struct CompressedPair {
  Matrix ax;
  Matrix ay;
  Index data_rows = 0;  // rows of the original pair, used for rank thresholds
};

CompressedPair compress(const Matrix& dx, const Matrix& dy);

// Symmetric Subspace Decomposition: the coefficient matrix C with the largest
// range such that R(DX C) = R(DY C). Null spaces are truncated with
// tol.eps_cap. DX and DY must have the same shape and full column rank.
SsdResult ssd(const Matrix& dx, const Matrix& dy, const Tolerances& tol = {});

// SSD in which null spaces are truncated with eps_approx instead, giving an
// approximately invariant subspace.
SsdResult approx_ssd(const Matrix& dx, const Matrix& dy, double eps_approx,
                     const Tolerances& tol = {});

// Same loop on an already compressed pair, truncating with `energy_eps`.
SsdResult ssd_compressed(const CompressedPair& data, const Tolerances& tol, double energy_eps);

// Square K solving (DX C) K = (DY C) in the least-squares sense.
Matrix ssd_reduced_operator(const Matrix& dx, const Matrix& dy, const CoefficientMatrix& c,
                            const Tolerances& tol = {});

}  // namespace koopsub
