#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include <json.hpp>

#include "koopsub/csv.hpp"
#include "koopsub/errors.hpp"
#include "koopsub/experiment.hpp"

using namespace koopsub;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kSmall = R"({
  "name": "small",
  "seed": 11,
  "system": {"kind": "unstable_nonlinear"},
  "data": {"sampling": "uniform", "region": [[-3, 3], [-3, 3]], "samples": 400},
  "dictionary": {"max_degree": 4},
  "signature": {"kind": "first", "count": 15},
  "agents": 3,
  "network": {"topology": "ring"},
  "evaluation": {"trajectories": 20, "length": 5, "region": [[-0.1, 0.1], [-3, 3]]}
})";

json small() { return json::parse(kSmall); }

ErrorCode parse_error(const json& j) {
  try {
    ExperimentConfig::parse(j.dump());
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal_error;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("koopsub_exp_" + name);
  fs::remove_all(p);
  return p;
}

std::string config_text(const std::string& file) {
  return io::read_file(fs::path(KOOPSUB_SOURCE_DIR) / "configs" / file);
}

}  // namespace

TEST(Config, ParsesSmallConfig) {
  const ExperimentConfig c = ExperimentConfig::parse(kSmall);
  EXPECT_EQ(c.name, "small");
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.samples, 400);
  EXPECT_EQ(c.max_degree, 4);
  EXPECT_EQ(c.agents, 3);
  EXPECT_EQ(c.signature.kind, SignaturePolicy::Kind::first);
  EXPECT_EQ(c.evaluation.trajectories, 20);
}

TEST(Config, BundledConfigsParse) {
  for (const char* f : {"example1.json", "example2_drops.json", "example2_nosignature.json",
                        "example3_vanderpol.json", "example4_lorenz.json"}) {
    EXPECT_NO_THROW(ExperimentConfig::parse(config_text(f))) << f;
  }
}

TEST(Config, SchemaViolationsAreConfigErrors) {
  json j = small();
  j["agents"] = 0;
  EXPECT_EQ(parse_error(j), ErrorCode::config_error);
  j = small();
  j["unknown_key"] = 1;
  EXPECT_EQ(parse_error(j), ErrorCode::config_error);
  j = small();
  j.erase("seed");
  EXPECT_EQ(parse_error(j), ErrorCode::config_error);
  EXPECT_THROW(ExperimentConfig::parse("{"), Error);
}

TEST(Config, SemanticChecks) {
  json j = small();
  j["data"]["region"] = json::array({json::array({-5, 5}), json::array({-3, 3})});
  EXPECT_EQ(parse_error(j), ErrorCode::config_error);
  j = small();
  j["data"]["region"] = json::array({json::array({-3, 3})});
  EXPECT_EQ(parse_error(j), ErrorCode::config_error);
  j = small();
  j["evaluation"]["length"] = 0;
  EXPECT_EQ(parse_error(j), ErrorCode::config_error);
}

TEST(PrepareData, SizesAndDeterminism) {
  const ExperimentConfig c = ExperimentConfig::parse(kSmall);
  const PreparedData a = prepare_data(c, {});
  const PreparedData b = prepare_data(c, {});
  EXPECT_EQ(a.snapshots.size(), 400);
  EXPECT_EQ(a.dictionary.size(), 15);
  EXPECT_EQ(a.snapshots.x, b.snapshots.x);
  RunOptions other;
  other.seed = 12;
  EXPECT_NE(prepare_data(c, other).snapshots.x, a.snapshots.x);
}

TEST(PrepareData, RegionSamplingBlocks) {
  json j = json::parse(config_text("example2_drops.json"));
  const ExperimentConfig c = ExperimentConfig::parse(j.dump());
  const PreparedData d = prepare_data(c, {});
  EXPECT_EQ(d.dictionary.size(), 66);
  EXPECT_EQ(d.snapshots.size(), c.signature_samples + 10 * c.samples_per_cell);
  EXPECT_EQ(d.snapshots.block.size(), static_cast<std::size_t>(d.snapshots.size()));
  for (Index r = c.signature_samples; r < d.snapshots.size(); ++r) {
    EXPECT_EQ(piecewise_cell(d.snapshots.x.row(r).transpose()), d.snapshots.block[r] + 1);
  }
}

TEST(ExperimentSchedule, SingleAgentAndDrops) {
  EXPECT_EQ(make_schedule(Topology::ring, 1, 0.5, 1).node_count(), 1);
  EXPECT_FALSE(make_schedule(Topology::complete, 4, 0.0, 1).time_varying());
  EXPECT_TRUE(make_schedule(Topology::path, 4, 0.3, 1).time_varying());
}

TEST(ExperimentRun, SmallExperimentEndToEnd) {
  const ExperimentConfig c = ExperimentConfig::parse(kSmall);
  const ExperimentReport r = run_experiment(c, {});
  EXPECT_EQ(r.dimension, 7);
  EXPECT_TRUE(r.agents_agree);
  EXPECT_TRUE(r.matches_ssd);
  EXPECT_EQ(r.eigenvalues.size(), 7u);
  ASSERT_TRUE(r.reduced_errors.has_value());
  EXPECT_EQ(r.reduced_errors->relative.median.size(), 6u);
  EXPECT_LT(r.reduced_errors->relative.median.back(), 1e-4);

  const fs::path dir = scratch("small");
  emit_plot_data(r, dir);
  for (const char* f : {"report.json", "timing.json", "coefficients.csv", "eigenpairs.csv", "fig_errors.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_FALSE(fs::exists(dir / "fig_heatmap.csv"));
  const json rep = json::parse(io::read_file(dir / "report.json"));
  EXPECT_EQ(rep["dimension"], 7);
  EXPECT_FALSE(rep.contains("wall_seconds"));
  const auto rows = csv::parse(io::read_file(dir / "fig_errors.csv"));
  EXPECT_EQ(rows.front().front(), "method");
  EXPECT_NE(io::read_file(dir / "eigenpairs.csv").find("\r\n"), std::string::npos);
}

TEST(ExperimentRun, DeterministicAcrossThreads) {
  const ExperimentConfig c = ExperimentConfig::parse(kSmall);
  RunOptions one, many;
  many.threads = 4;
  EXPECT_EQ(run_experiment(c, one).to_json(), run_experiment(c, many).to_json());
}

TEST(ExperimentRun, NoEvaluationSkipsFigures) {
  json j = small();
  j["evaluation"] = {{"trajectories", 0}};
  const ExperimentReport r = run_experiment(ExperimentConfig::parse(j.dump()), {});
  EXPECT_FALSE(r.reduced_errors.has_value());
  const fs::path dir = scratch("noeval");
  emit_plot_data(r, dir);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_FALSE(fs::exists(dir / "fig_errors.csv"));
}

TEST(ExperimentRun, RoundCapPropagates) {
  json j = small();
  j["network"]["topology"] = "path";
  j["max_rounds"] = 1;
  try {
    run_experiment(ExperimentConfig::parse(j.dump()), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_termination);
  }
}

TEST(Compare, SingleAgentRatioNearOne) {
  const ExperimentConfig c = ExperimentConfig::parse(kSmall);
  const SpeedupTable t = compare_speedup(c, {1, 3}, {});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_NEAR(t.rows[0].ratio, 1.0, 0.1);
  EXPECT_GT(t.rows[1].pssd_flops, 0u);
  const fs::path dir = scratch("compare");
  emit_speedup_data(t, dir);
  EXPECT_TRUE(fs::exists(dir / "speedup.csv"));
  const json j = json::parse(io::read_file(dir / "speedup.json"));
  EXPECT_EQ(j["rows"].size(), 2u);
}

TEST(Sweep, SmallSweepReachesConsensus) {
  json j = small();
  j["sweep"] = {{"drop_probabilities", {0.0, 0.5}}, {"seeds", 3}, {"max_rounds", 200}};
  j["network"]["topology"] = "complete";
  const SweepReport r = run_sweep(ExperimentConfig::parse(j.dump()), {});
  EXPECT_EQ(r.oracle_dimension, 7);
  ASSERT_EQ(r.points.size(), 2u);
  for (const auto& p : r.points) {
    EXPECT_TRUE(p.all_consensus);
    EXPECT_EQ(p.rounds.size(), 3u);
  }
  EXPECT_LE(r.points[0].mean_rounds, r.points[1].mean_rounds);
  const fs::path dir = scratch("sweep");
  emit_sweep_data(r, dir);
  EXPECT_TRUE(fs::exists(dir / "fig_consensus.csv"));
  EXPECT_NO_THROW(json::parse(io::read_file(dir / "sweep.json")));
}
