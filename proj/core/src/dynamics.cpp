#include "koopsub/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "koopsub/errors.hpp"

namespace koopsub {

bool Box::contains(const Vector& x) const {
  if (x.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (x(i) < bounds[i].first || x(i) > bounds[i].second) return false;
  }
  return true;
}

bool Box::contains(const Box& other) const {
  if (other.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (other.bounds[i].first < bounds[i].first || other.bounds[i].second > bounds[i].second) {
      return false;
    }
  }
  return true;
}

Box Box::cube(int n, double lo, double hi) {
  return Box{std::vector<std::pair<double, double>>(static_cast<std::size_t>(n), {lo, hi})};
}

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::unstable_nonlinear: return "unstable_nonlinear";
    case SystemKind::piecewise_linear: return "piecewise_linear";
    case SystemKind::vanderpol: return "vanderpol";
    case SystemKind::lorenz: return "lorenz";
  }
  return "unknown";
}

SystemKind system_kind_from_string(const std::string& name) {
  if (name == "unstable_nonlinear") return SystemKind::unstable_nonlinear;
  if (name == "piecewise_linear") return SystemKind::piecewise_linear;
  if (name == "vanderpol") return SystemKind::vanderpol;
  if (name == "lorenz") return SystemKind::lorenz;
  throw Error(ErrorCode::invalid_input, "unknown system kind: " + name);
}

DynamicalSystem DynamicalSystem::unstable_nonlinear() {
  return {SystemKind::unstable_nonlinear, 2, 0.0, Box::cube(2, -3.0, 3.0)};
}

DynamicalSystem DynamicalSystem::piecewise_linear(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_input, "piecewise_linear: n must be >= 1");
  return {SystemKind::piecewise_linear, n, 0.0, Box::cube(n, -1.0, 1.0)};
}

DynamicalSystem DynamicalSystem::vanderpol(double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_input, "vanderpol: dt must be positive");
  return {SystemKind::vanderpol, 2, dt, Box::cube(2, -4.0, 4.0)};
}

DynamicalSystem DynamicalSystem::lorenz(double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_input, "lorenz: dt must be positive");
  return {SystemKind::lorenz, 3, dt, Box{{{-20.0, 20.0}, {-30.0, 30.0}, {0.0, 50.0}}}};
}

Vector DynamicalSystem::step(const Vector& x) const {
  if (x.size() != state_dim) throw Error(ErrorCode::invalid_input, "step: wrong state dimension");
  switch (kind) {
    case SystemKind::unstable_nonlinear: return step_unstable_nonlinear(x);
    case SystemKind::piecewise_linear: return step_piecewise_linear(x);
    case SystemKind::vanderpol: return integrate_vanderpol(x, dt);
    case SystemKind::lorenz: return integrate_lorenz(x, dt);
  }
  throw Error(ErrorCode::internal_error, "step: unknown system kind");
}

Vector step_unstable_nonlinear(const Vector& x) {
  if (x.size() != 2) throw Error(ErrorCode::invalid_input, "step_unstable_nonlinear: need a 2-vector");
  Vector out(2);
  out(0) = 1.2 * x(0);
  out(1) = std::cbrt(0.8 * x(1) * x(1) * x(1) + 8.0 * x(0) * x(0) + 0.1);
  return out;
}

int piecewise_cell(const Vector& x) {
  const Index n = x.size();
  for (Index k = 0; k < n; ++k) {
    if (!(x(k) > 0.0 && x(k) <= 1.0)) continue;
    bool others = true;
    for (Index j = 0; j < n && others; ++j) {
      if (j != k && !(x(j) >= -1.0 && x(j) <= 0.0)) others = false;
    }
    if (others) return static_cast<int>(k + 1);
  }
  return 0;
}

Vector step_piecewise_linear(const Vector& x) {
  if (!Box::cube(static_cast<int>(x.size()), -1.0, 1.0).contains(x)) {
    throw Error(ErrorCode::invalid_input, "step_piecewise_linear: state outside [-1, 1]^n");
  }
  Vector out = x;
  if (const int k = piecewise_cell(x); k > 0) out(k - 1) = x(k - 1) / static_cast<double>(k);
  return out;
}

namespace {

template <typename Field>
Vector rk4(const Vector& x0, double dt, double max_substep, Field&& f) {
  if (dt < 0.0 || !(max_substep > 0.0)) {
    throw Error(ErrorCode::invalid_input, "rk4: need dt >= 0 and a positive substep");
  }
  if (dt == 0.0) return x0;
  const auto steps = static_cast<long>(std::ceil(dt / max_substep - 1e-9));
  const double h = dt / static_cast<double>(std::max(steps, 1L));
  Vector x = x0;
  for (long s = 0; s < std::max(steps, 1L); ++s) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace

Vector integrate_vanderpol(const Vector& x, double dt, double max_substep) {
  if (x.size() != 2) throw Error(ErrorCode::invalid_input, "integrate_vanderpol: need a 2-vector");
  return rk4(x, dt, max_substep, [](const Vector& s) {
    Vector d(2);
    d(0) = s(1);
    d(1) = -s(0) + (1.0 - s(0) * s(0)) * s(1);
    return d;
  });
}

Vector integrate_lorenz(const Vector& s, double dt, double max_substep) {
  if (s.size() != 3) throw Error(ErrorCode::invalid_input, "integrate_lorenz: need a 3-vector");
  return rk4(s, dt, max_substep, [](const Vector& v) {
    Vector d(3);
    d(0) = 10.0 * (v(1) - v(0));
    d(1) = v(0) * (28.0 - v(2)) - v(1);
    d(2) = v(0) * v(1) - (8.0 / 3.0) * v(2);
    return d;
  });
}

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_index(std::mt19937_64& engine, std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_input, "uniform_index: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine();
  } while (v >= limit);
  return v % n;
}

Region Region::inside_cell(int n, int k) {
  if (k < 1 || k > n) throw Error(ErrorCode::invalid_input, "Region::inside_cell: k out of range");
  return Region{Box::cube(n, -1.0, 1.0), Constraint::inside_cell, k};
}

Region Region::outside_cells(int n, int from_cell) {
  return Region{Box::cube(n, -1.0, 1.0), Constraint::outside_cells, from_cell};
}

bool Region::contains(const Vector& x) const {
  if (!box.contains(x)) return false;
  switch (constraint) {
    case Constraint::none: return true;
    case Constraint::inside_cell: return piecewise_cell(x) == cell;
    case Constraint::outside_cells: {
      const int k = piecewise_cell(x);
      return k == 0 || k < cell;
    }
  }
  return false;
}

Vector sample_point(const Region& region, std::mt19937_64& engine) {
  const int n = region.box.dim();
  Vector x(n);
  if (region.constraint == Region::Constraint::inside_cell) {
    // x_k uniform on (0, 1], the rest uniform on [-1, 0].
    for (int i = 0; i < n; ++i) {
      const double u = uniform01(engine);
      x(i) = (i == region.cell - 1) ? 1.0 - u : -u;
    }
    return x;
  }
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    for (int i = 0; i < n; ++i) {
      const auto [lo, hi] = region.box.bounds[static_cast<std::size_t>(i)];
      x(i) = lo + (hi - lo) * uniform01(engine);
    }
    if (region.contains(x)) return x;
  }
  throw Error(ErrorCode::invalid_input, "sample_point: region has negligible volume");
}

namespace {

std::vector<Index> choose_signature(const SignaturePolicy& policy, Index n, std::uint64_t seed) {
  std::vector<Index> rows;
  if (policy.kind == SignaturePolicy::Kind::none || policy.count <= 0) return rows;
  if (policy.count > n) throw Error(ErrorCode::invalid_input, "signature count exceeds sample count");
  if (policy.kind == SignaturePolicy::Kind::first) {
    rows.resize(static_cast<std::size_t>(policy.count));
    std::iota(rows.begin(), rows.end(), Index{0});
    return rows;
  }
  // Partial Fisher-Yates over the row indices.
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  auto engine = make_engine(seed, Stream::signature);
  for (Index i = 0; i < policy.count; ++i) {
    const auto j = i + static_cast<Index>(uniform_index(engine, static_cast<std::uint64_t>(n - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  rows.assign(perm.begin(), perm.begin() + policy.count);
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

SnapshotSet generate_snapshots(const DynamicalSystem& sys, const Region& region, Index n,
                               std::uint64_t seed, const SignaturePolicy& policy,
                               const TrajectorySampling& traj) {
  if (n < 1) throw Error(ErrorCode::invalid_input, "generate_snapshots: need at least one sample");
  if (region.box.dim() != sys.state_dim || !sys.state_space.contains(region.box)) {
    throw Error(ErrorCode::invalid_input, "generate_snapshots: region is not inside the state space");
  }
  SnapshotSet set;
  set.x.resize(n, sys.state_dim);
  set.y.resize(n, sys.state_dim);
  auto engine = make_engine(seed, Stream::data);
  if (!sys.continuous_time()) {
    for (Index i = 0; i < n; ++i) {
      const Vector x = sample_point(region, engine);
      set.x.row(i) = x.transpose();
      set.y.row(i) = sys.step(x).transpose();
    }
  } else {
    if (traj.steps_per_trajectory < 1) {
      throw Error(ErrorCode::invalid_input, "generate_snapshots: steps_per_trajectory must be >= 1");
    }
    Index row = 0;
    while (row < n) {
      Vector x = sample_point(region, engine);
      for (Index s = 0; s < traj.steps_per_trajectory && row < n; ++s, ++row) {
        const Vector next = sys.step(x);
        set.x.row(row) = x.transpose();
        set.y.row(row) = next.transpose();
        x = next;
      }
    }
  }
  set.signature_rows = choose_signature(policy, n, seed);
  return set;
}

Matrix generate_trajectory(const DynamicalSystem& sys, const Vector& x0, Index length) {
  if (length < 0) throw Error(ErrorCode::invalid_input, "generate_trajectory: negative length");
  Matrix out(length + 1, sys.state_dim);
  Vector x = x0;
  out.row(0) = x.transpose();
  for (Index k = 1; k <= length; ++k) {
    x = sys.step(x);
    out.row(k) = x.transpose();
  }
  return out;
}

SnapshotSet concat(const std::vector<SnapshotSet>& parts) {
  if (parts.empty()) throw Error(ErrorCode::invalid_input, "concat: no parts");
  Index total = 0;
  const Index dim = parts.front().state_dim();
  for (const auto& p : parts) {
    if (p.state_dim() != dim) throw Error(ErrorCode::invalid_input, "concat: state dimension mismatch");
    total += p.size();
  }
  SnapshotSet out;
  out.x.resize(total, dim);
  out.y.resize(total, dim);
  Index offset = 0;
  for (std::size_t b = 0; b < parts.size(); ++b) {
    const auto& p = parts[b];
    out.x.middleRows(offset, p.size()) = p.x;
    out.y.middleRows(offset, p.size()) = p.y;
    for (Index r : p.signature_rows) out.signature_rows.push_back(offset + r);
    out.block.insert(out.block.end(), static_cast<std::size_t>(p.size()), static_cast<int>(b));
    offset += p.size();
  }
  return out;
}

double max_map_error(const DynamicalSystem& sys, const SnapshotSet& set) {
  double worst = 0.0;
  for (Index i = 0; i < set.size(); ++i) {
    const Vector x = set.x.row(i).transpose();
    worst = std::max(worst, (set.y.row(i).transpose() - sys.step(x)).norm());
  }
  return worst;
}

}  // namespace koopsub
