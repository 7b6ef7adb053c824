#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "koopsub/dictionary.hpp"
#include "koopsub/dynamics.hpp"
#include "koopsub/errors.hpp"
#include "koopsub/linalg.hpp"
#include "koopsub/network.hpp"

namespace koopsub {

// Row assignment of a snapshot set to M agents. Signature rows are held by
// every agent in addition to its own rows.
struct DataPartition {
  std::vector<std::vector<Index>> agent_rows;  // sorted, signature rows excluded
  std::vector<Index> signature_rows;           // sorted

  int agent_count() const noexcept { return static_cast<int>(agent_rows.size()); }
  // Signature rows followed by the agent's own rows.
  std::vector<Index> local_rows(int agent) const;
};

struct PartitionPolicy {
  enum class Kind { even, weighted, per_region };
  Kind kind = Kind::even;
  std::vector<double> weights;  // weighted: one positive weight per agent
  // per_region: agent = snapshots.block[row]
  // Raise SignatureRankError unless the signature rows evaluate to a full
  // column rank pair. Switched off only to study runs without signature data.
  bool require_signature = true;
};

DataPartition partition_data(const SnapshotSet& snapshots, const MonomialDictionary& dict, int m,
                             const PartitionPolicy& policy, const Tolerances& tol = {});

struct AgentData {
  Matrix dx;
  Matrix dy;
};

std::vector<AgentData> make_agent_data(const SnapshotSet& snapshots,
                                       const MonomialDictionary& dict,
                                       const DataPartition& partition);

struct AgentState {
  int id = 0;
  CoefficientMatrix c;
  int flag = 0;
  std::int64_t k = 0;
  // Changes exactly when c changes; 0 for the initial identity.
  std::uint64_t version = 0;
};

std::vector<AgentState> initial_agents(int m, Index n_dict);

struct RoundRecord {
  std::int64_t round = 0;
  std::vector<int> flags;
  std::vector<Index> cols;
  std::vector<std::uint64_t> agent_flops;
  std::uint64_t messages = 0;
  std::optional<bool> consensus;  // set when an oracle is supplied
};

struct RoundOptions {
  std::optional<double> eps_approx;  // run the approximated SSD in Step 6
  int threads = 1;
};

// One synchronous round over g_k. Every agent reads only the round k-1
// states; the result does not depend on the evaluation order.
std::vector<AgentState> pssd_round(const std::vector<AgentState>& agents,
                                   const std::vector<AgentData>& data, const Digraph& g,
                                   const Tolerances& tol, const RoundOptions& options = {},
                                   std::vector<std::uint64_t>* agent_flops = nullptr);

struct PssdOptions {
  std::int64_t max_rounds = 100;
  // Stationarity window for time-varying schedules; 2 M when unset.
  std::optional<std::int64_t> window;
  std::optional<double> eps_approx;
  int threads = 1;
  bool shared_bus = false;
  // SSD subspace of the union data, used for per-round consensus checks.
  std::optional<CoefficientMatrix> oracle;
  double consensus_tol = 1e-8;
  // Stop as soon as every agent matches the oracle (an absorbing state).
  bool stop_at_consensus = false;
  // Keep the coefficient matrices of every round in the report.
  bool record_history = false;
};

enum class PssdStatus { terminated, stationary, consensus, max_rounds };

std::string to_string(PssdStatus status);

struct PssdRunReport {
  PssdStatus status = PssdStatus::max_rounds;
  std::int64_t rounds_executed = 0;
  // Last round in which some C changed (0 if none ever did).
  std::int64_t equilibrium_round = 0;
  std::optional<std::int64_t> termination_round;  // first round with all flags 1
  std::optional<std::int64_t> consensus_round;    // first round matching the oracle
  std::vector<CoefficientMatrix> final_c;
  std::vector<RoundRecord> rounds;
  std::vector<std::vector<CoefficientMatrix>> history;  // history[k][i], k = 0..rounds
  std::uint64_t total_messages = 0;
  std::uint64_t total_flops = 0;
};

class NoTermination : public Error {
 public:
  explicit NoTermination(PssdRunReport partial);
  const PssdRunReport& report() const noexcept { return report_; }

 private:
  PssdRunReport report_;
};

// Runs rounds until all flags are 1 (fixed schedules), until no C changes for
// the stationarity window (time-varying schedules), or until consensus when
// requested. Throws NoTermination when max_rounds is exhausted first.
PssdRunReport run_pssd(const std::vector<AgentData>& data, const DigraphSchedule& schedule,
                       const Tolerances& tol, const PssdOptions& options = {});

bool check_consensus(const std::vector<CoefficientMatrix>& cs, const CoefficientMatrix& oracle,
                     double tol);

}  // namespace koopsub
