#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "koopsub/linalg.hpp"

namespace koopsub {

// Axis-aligned box [lo_1, hi_1] x ... x [lo_n, hi_n].
struct Box {
  std::vector<std::pair<double, double>> bounds;

  int dim() const noexcept { return static_cast<int>(bounds.size()); }
  bool contains(const Vector& x) const;
  bool contains(const Box& other) const;
  static Box cube(int n, double lo, double hi);
};

enum class SystemKind { unstable_nonlinear, piecewise_linear, vanderpol, lorenz };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);

// The map x+ = T(x) of a benchmark system. Continuous-time systems are
// sampled with period dt.
struct DynamicalSystem {
  SystemKind kind = SystemKind::unstable_nonlinear;
  int state_dim = 2;
  double dt = 0.0;
  Box state_space;

  static DynamicalSystem unstable_nonlinear();
  static DynamicalSystem piecewise_linear(int n);
  static DynamicalSystem vanderpol(double dt);
  static DynamicalSystem lorenz(double dt);

  bool continuous_time() const noexcept {
    return kind == SystemKind::vanderpol || kind == SystemKind::lorenz;
  }

  Vector step(const Vector& x) const;
};

inline constexpr double kMaxSubstep = 1e-3;

// x1+ = 1.2 x1, x2+ = cbrt(0.8 x2^3 + 8 x1^2 + 0.1) with the real cube root.
Vector step_unstable_nonlinear(const Vector& x);

// Cell index k in 1..n when x lies in S_k = {0 < x_k <= 1, -1 <= x_j <= 0 for
// j != k}; 0 otherwise.
int piecewise_cell(const Vector& x);

// Scales coordinate k by 1/k on S_k, identity elsewhere. x must lie in [-1, 1]^n.
Vector step_piecewise_linear(const Vector& x);

// Classical RK4 over dt with equal substeps no longer than max_substep.
Vector integrate_vanderpol(const Vector& x, double dt, double max_substep = kMaxSubstep);
Vector integrate_lorenz(const Vector& s, double dt, double max_substep = kMaxSubstep);

// ---------------------------------------------------------------------------
// Sampling

// Named random substreams derived from one experiment seed, so that changing
// how many draws one consumer makes never shifts another consumer's values.
enum class Stream : std::uint64_t {
  data = 1,
  signature = 2,
  drops = 3,
  trajectories = 4,
  partition = 5,
  synthetic = 6,
};

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

// Uniform on [0, 1) with 53 random bits; identical on every platform.
double uniform01(std::mt19937_64& engine);

// Uniform integer in [0, n).
std::uint64_t uniform_index(std::mt19937_64& engine, std::uint64_t n);

// Sampling region: a box, optionally restricted to one cell S_k of the
// piecewise linear system or to the complement of cells S_k for k >= from_cell.
struct Region {
  enum class Constraint { none, inside_cell, outside_cells };

  Box box;
  Constraint constraint = Constraint::none;
  int cell = 0;

  static Region of(Box b) { return Region{std::move(b), Constraint::none, 0}; }
  static Region inside_cell(int n, int k);
  static Region outside_cells(int n, int from_cell);

  bool contains(const Vector& x) const;
};

Vector sample_point(const Region& region, std::mt19937_64& engine);

struct SignaturePolicy {
  enum class Kind { none, first, random };
  Kind kind = Kind::none;
  Index count = 0;
};

struct SnapshotSet {
  Matrix x;                          // N x n
  Matrix y;                          // N x n, y_i = T(x_i)
  std::vector<Index> signature_rows; // sorted
  std::vector<int> block;            // optional per-row block label (empty if unused)

  Index size() const noexcept { return x.rows(); }
  Index state_dim() const noexcept { return x.cols(); }
};

struct TrajectorySampling {
  Index steps_per_trajectory = 100;
};

// Discrete-time systems: rows of X i.i.d. uniform over the region, Y = T(X).
// Continuous-time systems: consecutive states dt apart along trajectories
// started uniformly in the region. Deterministic in (sys, region, n, seed).
SnapshotSet generate_snapshots(const DynamicalSystem& sys, const Region& region, Index n,
                               std::uint64_t seed, const SignaturePolicy& policy,
                               const TrajectorySampling& traj = {});

// Row k is T^k(x0), k = 0..length.
Matrix generate_trajectory(const DynamicalSystem& sys, const Vector& x0, Index length);

// Stacks sets in order. Signature rows of the parts are kept (offset), and the
// block label of each row is the index of the part it came from.
SnapshotSet concat(const std::vector<SnapshotSet>& parts);

// max_i ||y_i - T(x_i)||_2
double max_map_error(const DynamicalSystem& sys, const SnapshotSet& set);

}  // namespace koopsub
