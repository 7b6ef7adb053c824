#include "properties.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "koopsub/koopman.hpp"
#include "koopsub/pssd.hpp"
#include "koopsub/ssd.hpp"
#include "oracles.hpp"

namespace koopsub::testing {

namespace {

constexpr double kRangeTol = 1e-7;
constexpr double kInclusionTol = 1e-8;

struct Case {
  PlantedData data;
  DigraphSchedule schedule;
};

std::mt19937_64 case_engine(std::uint64_t seed, int c) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(c), std::uint64_t{0x5eed}};
  return std::mt19937_64(seq);
}

PlantedSpec random_spec(std::mt19937_64& rng) {
  PlantedSpec s;
  s.nd = std::uniform_int_distribution<int>(3, 8)(rng);
  s.signature_rows = s.nd + 1;
  s.rows_per_agent = 2 * s.nd + 2;
  const int m_max = std::max(1, (60 - s.signature_rows) / s.rows_per_agent);
  s.agents = std::uniform_int_distribution<int>(1, m_max)(rng);
  s.common_dim = std::uniform_int_distribution<int>(0, std::min(3, s.nd - 1))(rng);
  s.extra = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
  return s;
}

Case random_case(std::uint64_t seed, int c) {
  auto rng = case_engine(seed, c);
  const PlantedSpec spec = random_spec(rng);
  PlantedData data = make_planted(spec, rng);
  const int m = spec.agents;
  Digraph g = m == 1 ? Digraph(1) : random_strong_digraph(m, 0.3, rng);
  const bool lossy = m > 1 && std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  DigraphSchedule schedule = lossy ? DigraphSchedule::dropped(std::move(g), 0.4, rng())
                                   : DigraphSchedule::fixed(std::move(g));
  return {std::move(data), std::move(schedule)};
}

PssdRunReport run_with_history(const Case& k) {
  PssdOptions o;
  o.max_rounds = 200;
  o.record_history = true;
  try {
    return run_pssd(k.data.agents, k.schedule, Tolerances{}, o);
  } catch (const NoTermination& e) {
    return e.report();
  }
}

std::string where(std::int64_t round, int agent) {
  std::ostringstream s;
  s << "round " << round << " agent " << agent;
  return s.str();
}

}  // namespace

PropertyOutcome iterate_invariants(int cases, std::uint64_t seed) {
  PropertyOutcome out;
  for (int c = 0; c < cases; ++c, ++out.cases) {
    const Case k = random_case(seed, c);
    const PssdRunReport rep = run_with_history(k);
    bool ok = true;
    for (std::size_t r = 1; r < rep.history.size() && ok; ++r) {
      for (std::size_t i = 0; i < rep.history[r].size() && ok; ++i) {
        const ColumnBasis& ci = rep.history[r][i];
        if (ci.is_zero()) continue;
        const Matrix cm = ci.matrix();
        if (qr_range(cm).cols() != cm.cols()) {
          out.fail(c, where(static_cast<std::int64_t>(r), static_cast<int>(i)) + ": rank deficient iterate");
          ok = false;
          break;
        }
        const AgentData& d = k.data.agents[i];
        if (!same_range(d.dx * cm, d.dy * cm, kRangeTol)) {
          out.fail(c, where(static_cast<std::int64_t>(r), static_cast<int>(i)) + ": R(DX C) != R(DY C)");
          ok = false;
        }
      }
    }
  }
  return out;
}

PropertyOutcome iterate_monotonicity(int cases, std::uint64_t seed) {
  PropertyOutcome out;
  for (int c = 0; c < cases; ++c, ++out.cases) {
    const Case k = random_case(seed, c);
    const PssdRunReport rep = run_with_history(k);
    bool ok = true;
    for (std::size_t r = 1; r < rep.history.size() && ok; ++r) {
      const Digraph g = k.schedule.edges_at(static_cast<std::int64_t>(r));
      for (int i = 0; i < g.node_count() && ok; ++i) {
        const Matrix now = as_matrix(rep.history[r][i]);
        std::vector<int> sources = g.in_neighbors(i);
        sources.push_back(i);
        for (int j : sources) {
          const double gap = containment_gap(now, as_matrix(rep.history[r - 1][j]));
          if (gap > kInclusionTol) {
            out.fail(c, where(static_cast<std::int64_t>(r), i) + " not inside previous iterate of " +
                            std::to_string(j) + " (gap " + std::to_string(gap) + ")");
            ok = false;
            break;
          }
        }
      }
    }
  }
  return out;
}

PropertyOutcome oracle_inclusion(int cases, std::uint64_t seed) {
  PropertyOutcome out;
  for (int c = 0; c < cases; ++c, ++out.cases) {
    const Case k = random_case(seed, c);
    const Matrix oracle = as_matrix(ssd(k.data.dx, k.data.dy).c);
    const PssdRunReport rep = run_with_history(k);
    bool ok = true;
    for (std::size_t r = 0; r < rep.history.size() && ok; ++r) {
      for (std::size_t i = 0; i < rep.history[r].size(); ++i) {
        const double gap = containment_gap(oracle, as_matrix(rep.history[r][i]));
        if (gap > kInclusionTol) {
          out.fail(c, where(static_cast<std::int64_t>(r), static_cast<int>(i)) + ": SSD subspace not included");
          ok = false;
          break;
        }
      }
    }
  }
  return out;
}

PropertyOutcome data_addition_monotonicity(int cases, std::uint64_t seed) {
  PropertyOutcome out;
  for (int c = 0; c < cases; ++c, ++out.cases) {
    auto rng = case_engine(seed, c);
    const PlantedSpec spec = random_spec(rng);
    const PlantedData d = make_planted(spec, rng);
    // Signature rows keep the subset full rank; each remaining row is kept
    // with probability one half.
    std::vector<Index> rows;
    for (Index r = 0; r < d.dx.rows(); ++r) {
      if (r < spec.signature_rows || std::uniform_int_distribution<int>(0, 1)(rng) == 1) rows.push_back(r);
    }
    const Matrix sub_x = d.dx(rows, Eigen::all), sub_y = d.dy(rows, Eigen::all);
    const Matrix big = as_matrix(ssd(d.dx, d.dy).c);
    const Matrix small = as_matrix(ssd(sub_x, sub_y).c);
    const double gap = containment_gap(big, small);
    if (gap > kInclusionTol) out.fail(c, "SSD of all rows not inside SSD of the subset (gap " + std::to_string(gap) + ")");
  }
  return out;
}

PropertyOutcome planted_eigenvector_recovery(int cases, std::uint64_t seed) {
  PropertyOutcome out;
  for (int c = 0; c < cases; ++c, ++out.cases) {
    auto rng = case_engine(seed, c);
    PlantedSpec spec = random_spec(rng);
    spec.common_dim = std::max(spec.common_dim, 1);
    const PlantedData d = make_planted(spec, rng);
    const SsdResult res = ssd(d.dx, d.dy);
    const Matrix cm = as_matrix(res.c);
    if (!same_range(cm, d.oracle, kRangeTol)) {
      out.fail(c, "SSD range differs from the planted eigenvector span");
      continue;
    }
    const Matrix k = ssd_reduced_operator(d.dx, d.dy, res.c);
    const auto pairs = eigenpairs(k, res.c);
    bool ok = true;
    for (int j : d.common) {
      bool found = false;
      for (const auto& p : pairs) {
        if (std::abs(p.eigenvalue - d.lambda(j)) > 1e-8) continue;
        const Matrix wj = d.w.col(j);
        const double angle = angle_to_span(p.dictionary_coeffs, wj);
        const Eigen::VectorXcd v = p.dictionary_coeffs;
        const Eigen::VectorXcd lhs = d.dy.cast<std::complex<double>>() * v;
        const Eigen::VectorXcd rhs = d.dx.cast<std::complex<double>>() * v;
        const double residual = (lhs - p.eigenvalue * rhs).norm() / rhs.norm();
        found = angle < 1e-6 && residual < 1e-8 &&
                verify_linear_evolution(p.dictionary_coeffs, p.eigenvalue, d.dx, d.dy) < 1e-8;
        if (found) break;
      }
      if (!found) {
        out.fail(c, "planted eigenvector " + std::to_string(j) + " not recovered");
        ok = false;
        break;
      }
    }
    if (ok && pairs.size() != d.common.size()) out.fail(c, "unexpected number of eigenpairs");
  }
  return out;
}

}  // namespace koopsub::testing
