#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "koopsub/errors.hpp"
#include "koopsub/linalg.hpp"
#include "oracles.hpp"

using namespace koopsub;
namespace kt = koopsub::testing;

namespace {

ColumnBasis basis_of(std::initializer_list<Vector> cols) {
  Matrix m(cols.begin()->size(), static_cast<Index>(cols.size()));
  Index j = 0;
  for (const auto& c : cols) m.col(j++) = c;
  return ColumnBasis(m);
}

Vector e(Index n, Index i) { return Vector::Unit(n, i); }

}  // namespace

TEST(Svd, IdentityHasUnitSingularValues) {
  const SvdResult r = linalg::svd(Matrix::Identity(3, 3));
  ASSERT_EQ(r.singular_values.size(), 3);
  for (Index i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(r.singular_values(i), 1.0);
}

TEST(Svd, DiagonalWithZero) {
  Matrix a(2, 2);
  a << 3, 0, 0, 0;
  const Vector sv = linalg::singular_values(a);
  EXPECT_DOUBLE_EQ(sv(0), 3.0);
  EXPECT_DOUBLE_EQ(sv(1), 0.0);
}

TEST(Svd, ReconstructsRandomMatrix) {
  std::mt19937_64 rng(1);
  const Matrix a = kt::gaussian(20, 5, rng);
  const SvdResult r = linalg::svd(a);
  const Matrix back = r.left * r.singular_values.asDiagonal() * r.right.transpose();
  EXPECT_LT((a - back).norm() / r.singular_values(0), 1e-12);
  for (Index i = 1; i < r.singular_values.size(); ++i) {
    EXPECT_LE(r.singular_values(i), r.singular_values(i - 1));
  }
  EXPECT_LT((r.left.transpose() * r.left - Matrix::Identity(5, 5)).norm(), 1e-12);
}

TEST(Svd, RejectsNonFiniteInput) {
  Matrix a = Matrix::Ones(2, 2);
  a(0, 1) = std::nan("");
  try {
    linalg::svd(a);
    FAIL() << "expected InvalidMatrix";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::invalid_matrix);
  }
}

TEST(NumericalRank, DominantValue) {
  Vector sv(2);
  sv << 1.0, 1e-16;
  EXPECT_EQ(linalg::numerical_rank(sv, 2, Tolerances{}), 1);
}

TEST(NumericalRank, ZeroMatrix) {
  EXPECT_EQ(linalg::numerical_rank(Vector::Zero(2), 2, Tolerances{}), 0);
}

TEST(NumericalRank, ThresholdArithmetic) {
  const Index max_dim = 7;
  Vector sv(3);
  sv << 5.0, 3.0, 2e-13 * 5.0 * max_dim;
  // Threshold is rank_rtol * sigma_1 * max_dim = 1e-12 * 5 * 7.
  EXPECT_EQ(linalg::numerical_rank(sv, max_dim, Tolerances{}), 2);
}

TEST(TruncationIndex, ExactZeros) {
  Vector sv(3);
  sv << 1, 0, 0;
  EXPECT_EQ(linalg::truncation_index(sv, 1e-12), 2);
}

TEST(TruncationIndex, TinyTailIsTruncated) {
  Vector sv(2);
  sv << 1, 1e-9;
  // k = 1: 1 + 1e-18 > 1e-12 (1 + 1e-18); k = 2: 1e-18 <= 1e-12 (1 + 1e-18).
  EXPECT_EQ(linalg::truncation_index(sv, 1e-12), 2);
}

TEST(TruncationIndex, HalfEnergy) {
  Vector sv(2);
  sv << 1, 1;
  EXPECT_EQ(linalg::truncation_index(sv, 0.5), 2);
}

TEST(TruncationIndex, NothingTruncated) {
  Vector sv(2);
  sv << 1, 0.5;
  EXPECT_EQ(linalg::truncation_index(sv, 1e-12), 3);
}

TEST(NullSpace, FullRankIsEmpty) {
  EXPECT_TRUE(linalg::null_space_basis(Matrix::Identity(2, 2), Tolerances{}).is_zero());
}

TEST(NullSpace, RankOneSymmetric) {
  const ColumnBasis n = linalg::null_space_basis(Matrix::Ones(2, 2), Tolerances{});
  ASSERT_EQ(n.cols(), 1);
  Vector expected(2);
  expected << 1, -1;
  EXPECT_LT(kt::projector_gap(n.matrix(), expected), 1e-12);
  EXPECT_NEAR(n.matrix().col(0).norm(), 1.0, 1e-14);
}

TEST(NullSpace, ConstructedDependency) {
  std::mt19937_64 rng(2);
  const Matrix b = kt::gaussian(30, 4, rng);
  const Vector w = kt::gaussian(4, 1, rng);
  Matrix a(30, 5);
  a << b, b * w;
  const ColumnBasis n = linalg::null_space_basis(a, Tolerances{});
  ASSERT_EQ(n.cols(), 1);
  Vector dir(5);
  dir << w, -1.0;
  EXPECT_LT(kt::projector_gap(n.matrix(), dir), 1e-10);
}

TEST(RangeIntersection, IdenticalRanges) {
  const ColumnBasis i3 = ColumnBasis::identity(3);
  const ColumnBasis r = linalg::range_intersection_basis(i3, i3, Tolerances{});
  EXPECT_EQ(r.cols(), 3);
}

TEST(RangeIntersection, DisjointLines) {
  const ColumnBasis r =
      linalg::range_intersection_basis(basis_of({e(3, 0)}), basis_of({e(3, 1)}), Tolerances{});
  EXPECT_TRUE(r.is_zero());
  EXPECT_EQ(r.ambient_dim(), 3);
}

TEST(RangeIntersection, SharedAxisMatchesProjectorOracle) {
  const ColumnBasis a = basis_of({e(3, 0), e(3, 1)});
  const ColumnBasis b = basis_of({e(3, 1), e(3, 2)});
  const ColumnBasis r = linalg::range_intersection_basis(a, b, Tolerances{});
  const Matrix oracle = kt::projector_intersection(a.matrix(), b.matrix());
  ASSERT_EQ(oracle.cols(), 1);
  ASSERT_EQ(r.cols(), 1);
  EXPECT_LT(kt::projector_gap(r.matrix(), oracle), 1e-12);
}

TEST(RangeIntersection, RandomSubspacesMatchProjectorOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix common = kt::gaussian(8, 2, rng);
    Matrix a(8, 4), b(8, 5);
    a << common, kt::gaussian(8, 2, rng);
    b << kt::gaussian(8, 3, rng), common;
    const ColumnBasis r = linalg::range_intersection_basis(ColumnBasis(a), ColumnBasis(b), Tolerances{});
    const Matrix oracle = kt::projector_intersection(a, b);
    ASSERT_EQ(r.cols(), oracle.cols());
    EXPECT_LT(kt::projector_gap(r.matrix(), oracle), 1e-9);
  }
}

TEST(RangeIntersection, ZeroOperand) {
  const ColumnBasis r = linalg::range_intersection_basis(ColumnBasis::zero(3), ColumnBasis::identity(3), Tolerances{});
  EXPECT_TRUE(r.is_zero());
}

TEST(MultiIntersection, SingleElementIsReorthonormalized) {
  Matrix a(3, 2);
  a << 1, 1, 0, 1, 0, 0;
  const std::vector<ColumnBasis> list{ColumnBasis(a)};
  const ColumnBasis r = linalg::multi_intersection_basis(list, Tolerances{});
  ASSERT_EQ(r.cols(), 2);
  EXPECT_LT((r.matrix().transpose() * r.matrix() - Matrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_TRUE(kt::same_range(r.matrix(), a));
}

TEST(MultiIntersection, RepeatedIdentity) {
  const std::vector<ColumnBasis> list(3, ColumnBasis::identity(4));
  EXPECT_EQ(linalg::multi_intersection_basis(list, Tolerances{}).cols(), 4);
}

TEST(MultiIntersection, CommonLine) {
  std::mt19937_64 rng(4);
  const Matrix line = kt::gaussian(6, 1, rng);
  std::vector<ColumnBasis> list;
  for (int i = 0; i < 3; ++i) {
    Matrix m(6, 3);
    m << kt::gaussian(6, 1, rng), line, kt::gaussian(6, 1, rng);
    list.emplace_back(m);
  }
  const ColumnBasis r = linalg::multi_intersection_basis(list, Tolerances{});
  ASSERT_EQ(r.cols(), 1);
  EXPECT_LT(kt::projector_gap(r.matrix(), line), 1e-10);
}

TEST(RangeEqual, RightMultiplication) {
  std::mt19937_64 rng(5);
  const Matrix a = kt::gaussian(7, 3, rng);
  const Matrix g = kt::gaussian(3, 3, rng);
  EXPECT_TRUE(linalg::range_equal(ColumnBasis(a), ColumnBasis(a * g), 1e-10));
}

TEST(RangeEqual, OrthogonalLines) {
  EXPECT_FALSE(linalg::range_equal(basis_of({e(2, 0)}), basis_of({e(2, 1)}), 1e-8));
}

TEST(RangeEqual, ZeroSubspaces) {
  EXPECT_TRUE(linalg::range_equal(ColumnBasis::zero(3), ColumnBasis::zero(3), 1e-8));
  EXPECT_FALSE(linalg::range_equal(ColumnBasis::zero(3), ColumnBasis::identity(3), 1e-8));
}

TEST(SubspaceDistance, AgreesWithProjectorOracle) {
  std::mt19937_64 rng(6);
  const Matrix a = kt::gaussian(5, 2, rng), b = kt::gaussian(5, 2, rng);
  EXPECT_NEAR(linalg::subspace_distance(ColumnBasis(a), ColumnBasis(b)), kt::projector_gap(a, b), 1e-12);
}

TEST(ContainmentResidual, InsideAndOutside) {
  const ColumnBasis line = basis_of({e(3, 0)});
  const ColumnBasis plane = basis_of({e(3, 0), e(3, 1)});
  EXPECT_LT(linalg::containment_residual(line, plane), 1e-14);
  EXPECT_NEAR(linalg::containment_residual(basis_of({e(3, 2)}), plane), 1.0, 1e-14);
}

TEST(PseudoInverse, Identity) {
  EXPECT_LT((linalg::pseudo_inverse(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(PseudoInverse, SingularDiagonal) {
  Matrix a(2, 2);
  a << 2, 0, 0, 0;
  const Matrix p = linalg::pseudo_inverse(a);
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.0);
}

TEST(PseudoInverse, LeftInverseOfFullColumnRank) {
  std::mt19937_64 rng(7);
  const Matrix a = kt::gaussian(12, 4, rng);
  EXPECT_LT((linalg::pseudo_inverse(a) * a - Matrix::Identity(4, 4)).norm(), 1e-10);
}

TEST(LeastSquares, MatchesNormalEquations) {
  std::mt19937_64 rng(8);
  const Matrix a = kt::gaussian(15, 3, rng), b = kt::gaussian(15, 2, rng);
  const Matrix x = linalg::least_squares(a, b);
  const Matrix ref = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  EXPECT_LT((x - ref).norm(), 1e-10);
}

TEST(NormalizeSigns, LargestEntryPositive) {
  Matrix m(3, 2);
  m << 1, -0.5, -3, 0.2, 2, 0.1;
  linalg::normalize_signs(m);
  EXPECT_GT(m(1, 0), 0.0);
  EXPECT_GT(m(0, 1), 0.0);
}

TEST(Tolerances, RejectNonPositive) {
  Tolerances t;
  t.eps_cap = 0.0;
  EXPECT_THROW(t.validate(), Error);
  t.eps_cap = std::nan("");
  EXPECT_THROW(t.validate(), Error);
}

TEST(ColumnBasis, ZeroMarkerIsDistinct) {
  const ColumnBasis z = ColumnBasis::zero(4);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.cols(), 0);
  EXPECT_EQ(z.ambient_dim(), 4);
  EXPECT_THROW(z.matrix(), Error);
  EXPECT_TRUE(ColumnBasis(Matrix(4, 0)).is_zero());
}
