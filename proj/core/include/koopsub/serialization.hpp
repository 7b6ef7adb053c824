#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "koopsub/csv.hpp"
#include "koopsub/dictionary.hpp"
#include "koopsub/dynamics.hpp"
#include "koopsub/koopman.hpp"
#include "koopsub/network.hpp"
#include "koopsub/pssd.hpp"

// JSON and CSV forms of the library's value types. JSON is exchanged as text
// so the public headers carry no JSON library dependency.
namespace koopsub::serial {

// {"n_vars", "terms": [[...]], "scales": [...]}. Parsing also accepts
// {"n_vars", "max_degree"} and omitted scales.
std::string to_json(const MonomialDictionary& dict);
MonomialDictionary dictionary_from_json(std::string_view text);

// {"node_count", "edges": [[from, to], ...]}
std::string to_json(const Digraph& g);
Digraph digraph_from_json(std::string_view text);

// {"mode": "fixed" | "sequence" | "dropped", "params": {...}, "seed"}
std::string to_json(const DigraphSchedule& s);
DigraphSchedule schedule_from_json(std::string_view text);

// Per-round flags, column counts, consensus booleans and counters.
std::string to_json(const PssdRunReport& report);

// Long form (agent, row, col, value); zero matrices contribute no rows.
csv::Table coefficients_table(const std::vector<CoefficientMatrix>& cs);

// One row per (eigenpair, dictionary term).
csv::Table eigenpair_table(const std::vector<Eigenpair>& pairs, const MonomialDictionary& dict);

struct SnapshotSidecar {
  std::uint64_t seed = 0;
  SystemKind system = SystemKind::unstable_nonlinear;
  int state_dim = 0;
  double dt = 0.0;
  std::vector<Index> signature_rows;
  std::vector<int> block;
};

// CSV with columns x1..xn, y1..yn and a JSON sidecar at `<csv>.json`.
void write_snapshots(const SnapshotSet& set, const SnapshotSidecar& meta,
                     const std::filesystem::path& csv_path);
SnapshotSet read_snapshots(const std::filesystem::path& csv_path, SnapshotSidecar* meta = nullptr);

}  // namespace koopsub::serial
