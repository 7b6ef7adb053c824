#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "koopsub/dictionary.hpp"
#include "koopsub/dynamics.hpp"
#include "koopsub/koopman.hpp"
#include "koopsub/linalg.hpp"
#include "koopsub/pssd.hpp"

namespace koopsub {

enum class Topology { ring, complete, path };

struct ExperimentConfig {
  enum class Sampling { uniform, trajectories, regions };

  struct Evaluation {
    Index trajectories = 0;
    Index length = 0;
    std::optional<Box> region;  // defaults to the system's state space
  };
  struct Heatmap {
    Box region;
    int resolution = 0;
  };
  struct Sweep {
    std::vector<double> drop_probabilities;
    int seeds = 1;
    std::int64_t max_rounds = 500;
  };

  std::string name;
  std::uint64_t seed = 0;

  SystemKind system = SystemKind::unstable_nonlinear;
  int system_dimension = 0;  // piecewise linear system only
  double dt = 0.05;          // continuous-time systems only

  Sampling sampling = Sampling::uniform;
  std::optional<Box> region;
  Index samples = 0;
  Index full_samples = 0;
  Index steps_per_trajectory = 100;
  Index full_steps_per_trajectory = 100;
  // Region sampling: signature rows drawn outside cells S_k, k >= this value,
  // then samples_per_cell rows from every cell, one block per cell.
  int signature_outside_cells_from = 2;
  Index signature_samples = 0;
  Index samples_per_cell = 0;
  Index full_samples_per_cell = 0;

  int max_degree = 1;
  bool balance = false;

  SignaturePolicy signature;
  int agents = 1;
  PartitionPolicy partition;
  Topology topology = Topology::ring;
  double drop_probability = 0.0;
  bool shared_bus = false;

  Tolerances tol;
  bool approximate = false;
  std::int64_t max_rounds = 100;
  std::optional<std::int64_t> window;

  Evaluation evaluation;
  std::optional<Heatmap> heatmap;
  std::optional<Sweep> sweep;
  std::vector<int> compare_agents;

  // Validates against the published schema first, then checks the semantic
  // constraints the schema cannot express. Throws ConfigError.
  static ExperimentConfig parse(std::string_view json_text);
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool full = false;                  // paper-scale sample counts
  int threads = 1;
};

struct EigenRow {
  Complex eigenvalue;
  double residual = 0.0;  // verify_linear_evolution on the training data
};

struct ErrorSummary {
  QuartileSeries relative;
  QuartileSeries angle;
};

struct HeatmapGrid {
  Complex eigenvalue;
  std::vector<double> x1, x2, magnitude, phase;
};

struct ExperimentReport {
  std::string name;
  std::uint64_t seed = 0;
  Index samples = 0;
  Index dictionary_size = 0;
  MonomialDictionary dictionary;
  Index ssd_dimension = 0;
  std::size_t ssd_iterations = 0;
  std::uint64_t ssd_flops = 0;
  PssdRunReport pssd;
  Index dimension = 0;         // agent 0's final subspace
  bool agents_agree = false;   // every agent's range equals agent 0's
  bool matches_ssd = false;    // agent 0's range equals the centralized one
  std::vector<EigenRow> eigenvalues;
  std::vector<Eigenpair> eigenpairs;
  std::optional<ErrorSummary> reduced_errors;
  std::optional<ErrorSummary> original_errors;
  std::optional<HeatmapGrid> heatmap;
  std::vector<std::string> annotations;
  std::map<std::string, double> wall_seconds;  // excluded from report.json

  std::string to_json() const;
  std::string timing_json() const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

// Writes report.json, timing.json, coefficients.csv, eigenpairs.csv and the
// figure data files (fig_errors.csv, fig_heatmap.csv) that apply.
void emit_plot_data(const ExperimentReport& report, const std::filesystem::path& dir);

struct SweepPoint {
  double p = 0.0;
  std::vector<std::int64_t> rounds;  // consensus round per trial, -1 if none
  std::vector<Index> dims;           // agent 0's final dimension per trial
  double mean_rounds = 0.0;
  bool all_consensus = false;
};

struct SweepReport {
  std::string name;
  std::uint64_t seed = 0;
  Index oracle_dimension = 0;
  std::vector<SweepPoint> points;
  std::map<std::string, double> wall_seconds;

  std::string to_json() const;
};

// Drop-probability sweep on fixed data. Trial s uses the same drop stream for
// every p, so the dropped edge sets are nested in p.
SweepReport run_sweep(const ExperimentConfig& cfg, const RunOptions& opts);
void emit_sweep_data(const SweepReport& report, const std::filesystem::path& dir);

struct SpeedupRow {
  int agents = 0;
  std::int64_t equilibrium_round = 0;
  std::optional<std::int64_t> termination_round;
  // Sum over rounds 1..equilibrium of the largest per-agent tally.
  std::uint64_t pssd_flops = 0;
  // Largest per-agent tally of any single round.
  std::uint64_t max_round_flops = 0;
  std::uint64_t ssd_flops = 0;
  double ratio = 0.0;  // ssd_flops / pssd_flops
  double wall_pssd = 0.0;
  double wall_ssd = 0.0;
};

struct SpeedupTable {
  std::string name;
  std::vector<SpeedupRow> rows;

  std::string to_json() const;  // wall-clock fields excluded
};

SpeedupTable compare_speedup(const ExperimentConfig& cfg, const std::vector<int>& agent_counts,
                             const RunOptions& opts);
void emit_speedup_data(const SpeedupTable& table, const std::filesystem::path& dir);

// Data generation and dictionary construction shared by the runners.
struct PreparedData {
  DynamicalSystem system;
  SnapshotSet snapshots;
  MonomialDictionary dictionary;
};

PreparedData prepare_data(const ExperimentConfig& cfg, const RunOptions& opts);
DigraphSchedule make_schedule(Topology topology, int agents, double p, std::uint64_t seed);

}  // namespace koopsub
