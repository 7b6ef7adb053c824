#include "koopsub/pssd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "koopsub/flops.hpp"
#include "parallel.hpp"
#include "koopsub/ssd.hpp"

namespace koopsub {

namespace {

bool exact_identity(const Matrix& m) {
  return m.rows() == m.cols() && m.isIdentity(0.0);
}

class Engine {
 public:
  Engine(const std::vector<AgentData>& data, const Tolerances& tol, RoundOptions options)
      : data_(data), tol_(tol), options_(options), slots_(data.size()) {
    if (data.empty()) throw Error(ErrorCode::invalid_input, "pssd: no agents");
    const Index nd = data.front().dx.cols();
    for (const auto& d : data) {
      if (d.dx.cols() != nd || d.dy.cols() != nd || d.dx.rows() != d.dy.rows()) {
        throw Error(ErrorCode::invalid_input, "pssd: agent data shapes disagree");
      }
    }
    if (options_.eps_approx && !(*options_.eps_approx > 0.0)) {
      throw Error(ErrorCode::invalid_input, "pssd: eps_approx must be positive");
    }
  }

  std::vector<AgentState> round(const std::vector<AgentState>& prev, const Digraph& g,
                                std::int64_t k, std::vector<std::uint64_t>& agent_flops) {
    const int m = static_cast<int>(prev.size());
    if (g.node_count() != m || static_cast<int>(data_.size()) != m) {
      throw Error(ErrorCode::invalid_input, "pssd_round: digraph, agents and data disagree in size");
    }
    std::vector<AgentState> next(prev);
    agent_flops.assign(m, 0);
    detail::parallel_for(m, options_.threads, [&](int i) {
      try {
        flops::FlopScope scope;
        bool replayed = false;
        const Outcome& out = update(i, prev, g.in_neighbors(i), replayed);
        agent_flops[i] = scope.elapsed() + (replayed ? out.flops : 0);
        AgentState& s = next[i];
        s.k = k;
        if (out.next) {
          s.c = *out.next;
          s.flag = 0;
          s.version = static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(m) + i + 1;
        } else {
          s.flag = 1;
        }
      } catch (const Error& e) {
        throw Error(ErrorCode::abort_round,
                    "agent " + std::to_string(i) + " round " + std::to_string(k) + ": " + e.what());
      }
    });
    return next;
  }

 private:
  struct Outcome {
    std::optional<CoefficientMatrix> next;  // nullopt: C unchanged
    std::uint64_t flops = 0;                // work of the original evaluation
  };

  struct Slot {
    std::optional<CompressedPair> compressed;
    std::uint64_t memo_version = 0;
    std::map<std::vector<std::uint64_t>, Outcome> memo;
  };

  // The memo returns a stored outcome for a repeated inbox; the outcome's own
  // flop tally is replayed so counters do not depend on caching.
  const Outcome& update(int i, const std::vector<AgentState>& prev,
                        const std::vector<int>& in_neighbors, bool& replayed) {
    Slot& slot = slots_[i];
    if (!slot.compressed) slot.compressed = compress(data_[i].dx, data_[i].dy);
    if (slot.memo_version != prev[i].version) {
      slot.memo.clear();
      slot.memo_version = prev[i].version;
    }

    std::vector<const AgentState*> inbox{&prev[i]};
    for (int j : in_neighbors) inbox.push_back(&prev[j]);
    std::vector<std::uint64_t> key;
    std::vector<ColumnBasis> cs;
    for (const AgentState* s : inbox) {
      if (std::find(key.begin(), key.end(), s->version) != key.end()) continue;
      key.push_back(s->version);
      cs.push_back(s->c);
    }
    if (auto it = slot.memo.find(key); it != slot.memo.end()) {
      replayed = true;
      return it->second;
    }

    flops::FlopScope scope;
    Outcome out;
    const CoefficientMatrix& own = prev[i].c;
    const ColumnBasis d = linalg::multi_intersection_basis(cs, tol_);
    if (d.is_zero()) {
      if (!own.is_zero()) out.next = CoefficientMatrix::zero(own.ambient_dim());
    } else {
      const CompressedPair& full = *slot.compressed;
      const Matrix& dm = d.matrix();
      CompressedPair local{full.ax, full.ay, full.data_rows};
      if (!exact_identity(dm)) {
        local.ax = full.ax * dm;
        local.ay = full.ay * dm;
        flops::add(2 * flops::gemm(full.ax.rows(), dm.rows(), dm.cols()));
      }
      const double eps = options_.eps_approx.value_or(tol_.eps_cap);
      const SsdResult e = ssd_compressed(local, tol_, eps);
      if (e.c.is_zero()) {
        out.next = CoefficientMatrix::zero(own.ambient_dim());
      } else if (e.c.cols() < own.cols()) {
        const Matrix& em = e.c.matrix();
        out.next = exact_identity(em) ? CoefficientMatrix(dm) : CoefficientMatrix(Matrix(dm * em));
        flops::add(flops::gemm(dm.rows(), dm.cols(), em.cols()));
      }
    }
    out.flops = scope.elapsed();
    return slot.memo.emplace(std::move(key), std::move(out)).first->second;
  }

  const std::vector<AgentData>& data_;
  Tolerances tol_;
  RoundOptions options_;
  std::vector<Slot> slots_;
};

}  // namespace

std::vector<Index> DataPartition::local_rows(int agent) const {
  std::vector<Index> rows(signature_rows);
  const auto& own = agent_rows.at(agent);
  rows.insert(rows.end(), own.begin(), own.end());
  return rows;
}

DataPartition partition_data(const SnapshotSet& snapshots, const MonomialDictionary& dict, int m,
                             const PartitionPolicy& policy, const Tolerances& tol) {
  if (m < 1) throw Error(ErrorCode::invalid_input, "partition_data: need at least one agent");
  const Index n = snapshots.size();
  std::vector<Index> sig = snapshots.signature_rows;
  std::sort(sig.begin(), sig.end());
  sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
  for (Index r : sig) {
    if (r < 0 || r >= n) throw Error(ErrorCode::invalid_input, "partition_data: signature row out of range");
  }

  if (policy.require_signature) {
    if (sig.empty()) throw Error(ErrorCode::signature_rank, "partition_data: no signature rows");
    const Matrix sx = evaluate(dict, snapshots.x(sig, Eigen::all));
    const Matrix sy = evaluate(dict, snapshots.y(sig, Eigen::all));
    for (const Matrix* s : {&sx, &sy}) {
      const Vector sv = linalg::singular_values(*s);
      if (linalg::numerical_rank(sv, std::max(s->rows(), s->cols()), tol) != dict.size()) {
        throw Error(ErrorCode::signature_rank,
                    "partition_data: signature data does not have full column rank");
      }
    }
  }

  std::vector<Index> rest;
  rest.reserve(n - static_cast<Index>(sig.size()));
  for (Index r = 0, s = 0; r < n; ++r) {
    if (s < static_cast<Index>(sig.size()) && sig[s] == r) {
      ++s;
      continue;
    }
    rest.push_back(r);
  }

  DataPartition p;
  p.signature_rows = sig;
  p.agent_rows.resize(m);
  const auto count = static_cast<Index>(rest.size());
  switch (policy.kind) {
    case PartitionPolicy::Kind::even:
      for (int i = 0; i < m; ++i) {
        const Index lo = count * i / m, hi = count * (i + 1) / m;
        p.agent_rows[i].assign(rest.begin() + lo, rest.begin() + hi);
      }
      break;
    case PartitionPolicy::Kind::weighted: {
      if (static_cast<int>(policy.weights.size()) != m) {
        throw Error(ErrorCode::invalid_input, "partition_data: need one weight per agent");
      }
      double total = 0.0;
      for (double w : policy.weights) {
        if (!std::isfinite(w) || w <= 0.0) {
          throw Error(ErrorCode::invalid_input, "partition_data: weights must be positive");
        }
        total += w;
      }
      double cum = 0.0;
      Index lo = 0;
      for (int i = 0; i < m; ++i) {
        cum += policy.weights[i];
        const Index hi = i + 1 == m ? count : static_cast<Index>(std::floor(count * (cum / total)));
        p.agent_rows[i].assign(rest.begin() + lo, rest.begin() + std::max(lo, hi));
        lo = std::max(lo, hi);
      }
      break;
    }
    case PartitionPolicy::Kind::per_region:
      if (static_cast<Index>(snapshots.block.size()) != n) {
        throw Error(ErrorCode::invalid_input, "partition_data: per_region needs block labels");
      }
      for (Index r : rest) {
        const int b = snapshots.block[r];
        if (b < 0 || b >= m) throw Error(ErrorCode::invalid_input, "partition_data: block label out of range");
        p.agent_rows[b].push_back(r);
      }
      break;
  }
  return p;
}

std::vector<AgentData> make_agent_data(const SnapshotSet& snapshots,
                                       const MonomialDictionary& dict,
                                       const DataPartition& partition) {
  const Matrix ex = evaluate(dict, snapshots.x);
  const Matrix ey = evaluate(dict, snapshots.y);
  std::vector<AgentData> out;
  out.reserve(partition.agent_count());
  for (int i = 0; i < partition.agent_count(); ++i) {
    const std::vector<Index> rows = partition.local_rows(i);
    out.push_back({ex(rows, Eigen::all), ey(rows, Eigen::all)});
  }
  return out;
}

std::vector<AgentState> initial_agents(int m, Index n_dict) {
  std::vector<AgentState> agents(m);
  for (int i = 0; i < m; ++i) {
    agents[i].id = i;
    agents[i].c = CoefficientMatrix::identity(n_dict);
  }
  return agents;
}

std::vector<AgentState> pssd_round(const std::vector<AgentState>& agents,
                                   const std::vector<AgentData>& data, const Digraph& g,
                                   const Tolerances& tol, const RoundOptions& options,
                                   std::vector<std::uint64_t>* agent_flops) {
  if (agents.empty()) throw Error(ErrorCode::invalid_input, "pssd_round: no agents");
  const std::int64_t k = agents.front().k;
  for (const auto& a : agents) {
    if (a.k != k) throw Error(ErrorCode::invalid_input, "pssd_round: agents are at different rounds");
  }
  Engine engine(data, tol, options);
  std::vector<std::uint64_t> tally;
  auto next = engine.round(agents, g, k + 1, tally);
  if (agent_flops) *agent_flops = std::move(tally);
  return next;
}

std::string to_string(PssdStatus status) {
  switch (status) {
    case PssdStatus::terminated: return "terminated";
    case PssdStatus::stationary: return "stationary";
    case PssdStatus::consensus: return "consensus";
    case PssdStatus::max_rounds: return "max_rounds";
  }
  return "unknown";
}

NoTermination::NoTermination(PssdRunReport partial)
    : Error(ErrorCode::no_termination,
            "pssd: no termination within " + std::to_string(partial.rounds_executed) + " rounds"),
      report_(std::move(partial)) {}

bool check_consensus(const std::vector<CoefficientMatrix>& cs, const CoefficientMatrix& oracle,
                     double tol) {
  return std::all_of(cs.begin(), cs.end(),
                     [&](const CoefficientMatrix& c) { return linalg::range_equal(c, oracle, tol); });
}

PssdRunReport run_pssd(const std::vector<AgentData>& data, const DigraphSchedule& schedule,
                       const Tolerances& tol, const PssdOptions& options) {
  tol.validate();
  if (options.max_rounds < 1) throw Error(ErrorCode::invalid_input, "run_pssd: max_rounds must be >= 1");
  const int m = static_cast<int>(data.size());
  if (schedule.node_count() != m) {
    throw Error(ErrorCode::invalid_input, "run_pssd: schedule and data disagree on the agent count");
  }
  const std::int64_t window = options.window.value_or(2 * static_cast<std::int64_t>(m));
  if (window < 1) throw Error(ErrorCode::invalid_input, "run_pssd: window must be >= 1");

  Engine engine(data, tol, RoundOptions{options.eps_approx, options.threads});
  std::vector<AgentState> agents = initial_agents(m, data.front().dx.cols());
  auto current_cs = [&] {
    std::vector<CoefficientMatrix> cs;
    cs.reserve(m);
    for (const auto& a : agents) cs.push_back(a.c);
    return cs;
  };

  PssdRunReport report;
  if (options.record_history) report.history.push_back(current_cs());
  std::int64_t quiet = 0;
  bool stopped = false;
  for (std::int64_t k = 1; k <= options.max_rounds; ++k) {
    const Digraph g = schedule.edges_at(k);
    RoundRecord rec;
    rec.round = k;
    agents = engine.round(agents, g, k, rec.agent_flops);
    bool changed = false;
    for (const auto& a : agents) {
      rec.flags.push_back(a.flag);
      rec.cols.push_back(a.c.cols());
      changed = changed || a.flag == 0;
    }
    rec.messages = options.shared_bus ? static_cast<std::uint64_t>(m) : g.edge_count();
    report.total_messages += rec.messages;
    for (auto f : rec.agent_flops) report.total_flops += f;
    const std::vector<CoefficientMatrix> cs = current_cs();
    if (options.oracle) {
      rec.consensus = check_consensus(cs, *options.oracle, options.consensus_tol);
      if (*rec.consensus && !report.consensus_round) report.consensus_round = k;
    }
    if (options.record_history) report.history.push_back(cs);
    report.rounds.push_back(std::move(rec));
    report.rounds_executed = k;
    if (changed) {
      report.equilibrium_round = k;
      quiet = 0;
    } else {
      ++quiet;
    }

    if (options.stop_at_consensus && report.rounds.back().consensus.value_or(false)) {
      report.status = PssdStatus::consensus;
      stopped = true;
    } else if (!schedule.time_varying() && !changed) {
      report.status = PssdStatus::terminated;
      stopped = true;
    } else if (schedule.time_varying() && quiet >= window) {
      report.status = PssdStatus::stationary;
      stopped = true;
    }
    if (stopped) break;
  }

  for (const auto& rec : report.rounds) {
    if (rec.round > report.equilibrium_round &&
        std::all_of(rec.flags.begin(), rec.flags.end(), [](int f) { return f == 1; })) {
      report.termination_round = rec.round;
      break;
    }
  }
  report.final_c = current_cs();
  if (!stopped) {
    report.status = PssdStatus::max_rounds;
    throw NoTermination(std::move(report));
  }
  return report;
}

}  // namespace koopsub
