#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "koopsub/dynamics.hpp"
#include "koopsub/errors.hpp"

using namespace koopsub;

namespace {

Vector v2(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

// Fixed-step RK4 on arrays, written independently of the library integrator.
std::array<double, 2> vdp_reference(std::array<double, 2> s, double dt, int steps) {
  const double h = dt / steps;
  auto f = [](const std::array<double, 2>& u) {
    return std::array<double, 2>{u[1], -u[0] + (1.0 - u[0] * u[0]) * u[1]};
  };
  for (int i = 0; i < steps; ++i) {
    const auto k1 = f(s);
    const auto k2 = f({s[0] + h / 2 * k1[0], s[1] + h / 2 * k1[1]});
    const auto k3 = f({s[0] + h / 2 * k2[0], s[1] + h / 2 * k2[1]});
    const auto k4 = f({s[0] + h * k3[0], s[1] + h * k3[1]});
    for (int j = 0; j < 2; ++j) s[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return s;
}

}  // namespace

TEST(UnstableNonlinear, StepValues) {
  const Vector y = step_unstable_nonlinear(v2(1.0, 2.0));
  EXPECT_DOUBLE_EQ(y(0), 1.2);
  EXPECT_NEAR(y(1), std::cbrt(0.8 * 8.0 + 8.0 + 0.1), 1e-15);
  const Vector z = step_unstable_nonlinear(v2(0.0, -3.0));
  EXPECT_NEAR(z(1), -std::cbrt(0.8 * 27.0 - 0.1), 1e-14);
}

TEST(UnstableNonlinear, CubeOfSecondCoordinateIsPolynomial) {
  for (double a : {-2.5, -0.3, 0.0, 1.7}) {
    for (double b : {-2.9, -0.1, 0.4, 2.2}) {
      const Vector y = step_unstable_nonlinear(v2(a, b));
      EXPECT_NEAR(y(1) * y(1) * y(1), 0.8 * b * b * b + 8.0 * a * a + 0.1, 1e-12);
    }
  }
}

TEST(PiecewiseLinear, Cells) {
  EXPECT_EQ(piecewise_cell(v2(0.5, -0.5)), 1);
  EXPECT_EQ(piecewise_cell(v2(-0.5, 0.5)), 2);
  EXPECT_EQ(piecewise_cell(v2(0.5, 0.5)), 0);
  EXPECT_EQ(piecewise_cell(v2(-0.5, -0.5)), 0);
  EXPECT_EQ(piecewise_cell(v2(0.0, -0.5)), 0);
  EXPECT_EQ(piecewise_cell(v2(1.0, 0.0)), 1);
}

TEST(PiecewiseLinear, StepExamples) {
  const Vector y = step_piecewise_linear(v2(-0.5, 0.5));
  EXPECT_DOUBLE_EQ(y(0), -0.5);
  EXPECT_DOUBLE_EQ(y(1), 0.25);
  const Vector z = step_piecewise_linear(v2(0.3, 0.4));
  EXPECT_DOUBLE_EQ(z(0), 0.3);
  EXPECT_DOUBLE_EQ(z(1), 0.4);
  Vector x = Vector::Constant(4, -0.2);
  x(3) = 0.8;
  const Vector w = step_piecewise_linear(x);
  EXPECT_DOUBLE_EQ(w(3), 0.2);
  EXPECT_DOUBLE_EQ(w(0), -0.2);
  EXPECT_THROW(step_piecewise_linear(v2(1.5, 0.0)), Error);
}

TEST(VanDerPol, MatchesFineReference) {
  for (const auto& s0 : {std::array<double, 2>{1.0, 0.0}, std::array<double, 2>{-3.0, 2.5},
                         std::array<double, 2>{0.2, -3.9}}) {
    const Vector y = integrate_vanderpol(v2(s0[0], s0[1]), 0.05);
    const auto ref = vdp_reference(s0, 0.05, 5000);
    EXPECT_NEAR(y(0), ref[0], 1e-10);
    EXPECT_NEAR(y(1), ref[1], 1e-10);
  }
}

TEST(VanDerPol, SubstepHalvingIsConverged) {
  const Vector x = v2(2.0, -1.0);
  const Vector a = integrate_vanderpol(x, 0.05, 1e-3);
  const Vector b = integrate_vanderpol(x, 0.05, 5e-4);
  EXPECT_LT((a - b).norm(), 1e-9);
  EXPECT_EQ(integrate_vanderpol(x, 0.0), x);
}

TEST(Lorenz, ZAxisDecaysExponentially) {
  Vector s(3);
  s << 0.0, 0.0, 40.0;
  const Vector y = integrate_lorenz(s, 0.01);
  EXPECT_EQ(y(0), 0.0);
  EXPECT_EQ(y(1), 0.0);
  EXPECT_NEAR(y(2), 40.0 * std::exp(-8.0 * 0.01 / 3.0), 1e-10);
}

TEST(Lorenz, SubstepHalvingIsConverged) {
  Vector s(3);
  s << 5.0, -7.0, 25.0;
  const Vector a = integrate_lorenz(s, 0.01, 1e-3);
  const Vector b = integrate_lorenz(s, 0.01, 5e-4);
  EXPECT_LT((a - b).norm(), 1e-9);
}

TEST(Systems, Construction) {
  EXPECT_EQ(DynamicalSystem::piecewise_linear(10).state_dim, 10);
  EXPECT_THROW(DynamicalSystem::vanderpol(0.0), Error);
  EXPECT_THROW(DynamicalSystem::lorenz(-1.0), Error);
  EXPECT_EQ(system_kind_from_string("lorenz"), SystemKind::lorenz);
  EXPECT_EQ(to_string(SystemKind::vanderpol), "vanderpol");
  EXPECT_THROW(system_kind_from_string("duffing"), Error);
}

TEST(Engines, StreamsAreIndependentAndReproducible) {
  auto a = make_engine(7, Stream::data, 0);
  auto b = make_engine(7, Stream::data, 0);
  auto c = make_engine(7, Stream::drops, 0);
  auto d = make_engine(7, Stream::data, 1);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(a);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(uniform_index(a, 7), 7u);
  }
}

TEST(Regions, InsideCellSamplesStayInCell) {
  auto eng = make_engine(1, Stream::synthetic);
  const Region r = Region::inside_cell(5, 3);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(piecewise_cell(sample_point(r, eng)), 3);
}

TEST(Regions, OutsideCells) {
  const Region r = Region::outside_cells(4, 2);
  auto eng = make_engine(2, Stream::synthetic);
  for (int i = 0; i < 200; ++i) {
    const int k = piecewise_cell(sample_point(r, eng));
    EXPECT_TRUE(k == 0 || k == 1) << k;
  }
}

TEST(Snapshots, DeterministicAndExact) {
  const auto sys = DynamicalSystem::unstable_nonlinear();
  const Region region = Region::of(Box::cube(2, -3.0, 3.0));
  const SignaturePolicy sig{SignaturePolicy::Kind::first, 15};
  const SnapshotSet a = generate_snapshots(sys, region, 500, 11, sig);
  const SnapshotSet b = generate_snapshots(sys, region, 500, 11, sig);
  const SnapshotSet c = generate_snapshots(sys, region, 500, 12, sig);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(a.x, c.x);
  EXPECT_EQ(max_map_error(sys, a), 0.0);
  ASSERT_EQ(a.signature_rows.size(), 15u);
  EXPECT_EQ(a.signature_rows.front(), 0);
  EXPECT_EQ(a.signature_rows.back(), 14);
  EXPECT_LE(a.x.cwiseAbs().maxCoeff(), 3.0);
}

TEST(Snapshots, RandomSignatureIsSortedAndDistinct) {
  const auto sys = DynamicalSystem::unstable_nonlinear();
  const SnapshotSet s = generate_snapshots(sys, Region::of(Box::cube(2, -1, 1)), 100, 3,
                                           {SignaturePolicy::Kind::random, 30});
  ASSERT_EQ(s.signature_rows.size(), 30u);
  for (std::size_t i = 1; i < s.signature_rows.size(); ++i) {
    EXPECT_LT(s.signature_rows[i - 1], s.signature_rows[i]);
  }
  EXPECT_THROW(generate_snapshots(sys, Region::of(Box::cube(2, -1, 1)), 10, 3,
                                  {SignaturePolicy::Kind::first, 11}),
               Error);
}

TEST(Snapshots, TrajectorySamplingChainsStates) {
  const auto sys = DynamicalSystem::vanderpol(0.05);
  const SnapshotSet s = generate_snapshots(sys, Region::of(Box::cube(2, -4, 4)), 25, 5, {},
                                           TrajectorySampling{10});
  for (Index r = 0; r < 25; ++r) {
    if (r % 10 != 0) EXPECT_EQ(s.x.row(r), s.y.row(r - 1));
  }
  EXPECT_LT(max_map_error(sys, s), 1e-15);
}

TEST(Snapshots, RegionOutsideStateSpaceRejected) {
  EXPECT_THROW(generate_snapshots(DynamicalSystem::piecewise_linear(2),
                                  Region::of(Box::cube(2, -2, 2)), 5, 1, {}),
               Error);
}

TEST(Trajectory, UnstableNonlinearFirstCoordinateGrows) {
  const auto sys = DynamicalSystem::unstable_nonlinear();
  const Matrix t = generate_trajectory(sys, v2(0.1, 0.0), 3);
  ASSERT_EQ(t.rows(), 4);
  EXPECT_DOUBLE_EQ(t(0, 0), 0.1);
  EXPECT_NEAR(t(3, 0), 0.1 * 1.2 * 1.2 * 1.2, 1e-15);
  EXPECT_EQ(generate_trajectory(sys, v2(1, 1), 0).rows(), 1);
}

TEST(Concat, OffsetsSignatureAndLabelsBlocks) {
  SnapshotSet a, b;
  a.x = a.y = Matrix::Zero(3, 2);
  a.signature_rows = {0, 2};
  b.x = b.y = Matrix::Ones(2, 2);
  b.signature_rows = {1};
  const SnapshotSet c = concat({a, b});
  EXPECT_EQ(c.size(), 5);
  EXPECT_EQ(c.signature_rows, (std::vector<Index>{0, 2, 4}));
  EXPECT_EQ(c.block, (std::vector<int>{0, 0, 0, 1, 1}));
}
