#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "koopsub/csv.hpp"
#include "koopsub/errors.hpp"
#include "koopsub/experiment.hpp"
#include "koopsub/pssd.hpp"
#include "koopsub/serialization.hpp"
#include "koopsub/schema.hpp"

namespace {

enum Exit : int { ok = 0, config = 2, numerical = 3, no_termination = 4 };

int exit_code(koopsub::ErrorCode code) {
  using koopsub::ErrorCode;
  switch (code) {
    case ErrorCode::config_error:
    case ErrorCode::invalid_input:
    case ErrorCode::io_error:
      return Exit::config;
    case ErrorCode::no_termination:
      return Exit::no_termination;
    default:
      return Exit::numerical;
  }
}

void report_error(const std::string& code, const std::string& message,
                  const nlohmann::json& partial = nullptr) {
  nlohmann::json j = {{"error", {{"code", code}, {"message", message}}}};
  if (!partial.is_null()) j["error"]["partial_report"] = partial;
  std::cerr << j.dump() << "\n";
}

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;
  std::string out;
  bool full = false;
  int threads = 1;
};

void add_common(CLI::App* sub, Common& c, bool with_outputs) {
  sub->add_option("--config", c.config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  if (!with_outputs) return;
  c.seed_option = sub->add_option("--seed", c.seed, "override the config seed");
  sub->add_option("--out", c.out, "output directory (default: out/<name>)");
  sub->add_flag("--full", c.full, "use the paper-scale sample counts");
  sub->add_option("--threads", c.threads, "worker threads for agents and trajectories")
      ->check(CLI::PositiveNumber);
}

koopsub::ExperimentConfig load(const Common& c) {
  return koopsub::ExperimentConfig::parse(koopsub::io::read_file(c.config_path));
}

koopsub::RunOptions options(const Common& c) {
  koopsub::RunOptions o;
  if (c.seed_option != nullptr && c.seed_option->count() > 0) o.seed = c.seed;
  o.full = c.full;
  o.threads = c.threads;
  return o;
}

std::filesystem::path out_dir(const Common& c, const koopsub::ExperimentConfig& cfg) {
  return c.out.empty() ? std::filesystem::path("out") / cfg.name : std::filesystem::path(c.out);
}

int cmd_run(const Common& c) {
  const auto cfg = load(c);
  const auto report = koopsub::run_experiment(cfg, options(c));
  const auto dir = out_dir(c, cfg);
  koopsub::emit_plot_data(report, dir);
  std::cout << cfg.name << ": dimension " << report.dimension << " (union SSD " << report.ssd_dimension
            << "), status " << koopsub::to_string(report.pssd.status);
  if (report.pssd.consensus_round) std::cout << ", consensus round " << *report.pssd.consensus_round;
  if (report.pssd.termination_round) std::cout << ", termination round " << *report.pssd.termination_round;
  std::cout << "\n";
  constexpr std::size_t kShown = 12;
  for (std::size_t i = 0; i < std::min(kShown, report.eigenvalues.size()); ++i) {
    const auto& e = report.eigenvalues[i];
    std::cout << "  lambda = " << e.eigenvalue.real() << (e.eigenvalue.imag() < 0 ? " - " : " + ")
              << std::abs(e.eigenvalue.imag()) << "j  |lambda| = " << std::abs(e.eigenvalue)
              << "  residual " << e.residual << "\n";
  }
  if (report.eigenvalues.size() > kShown) {
    std::cout << "  ... " << report.eigenvalues.size() - kShown << " more in eigenpairs.csv\n";
  }
  for (const auto& a : report.annotations) std::cout << "  " << a << "\n";
  std::cout << "wrote " << dir.string() << "\n";
  return Exit::ok;
}

int cmd_sweep(const Common& c) {
  const auto cfg = load(c);
  const auto report = koopsub::run_sweep(cfg, options(c));
  const auto dir = out_dir(c, cfg);
  koopsub::emit_sweep_data(report, dir);
  for (const auto& p : report.points) {
    std::cout << "p = " << p.p << "  mean consensus round " << p.mean_rounds
              << (p.all_consensus ? "" : "  (some trials failed)") << "\n";
  }
  std::cout << "wrote " << dir.string() << "\n";
  return Exit::ok;
}

int cmd_compare(const Common& c, std::vector<int> agents) {
  const auto cfg = load(c);
  if (agents.empty()) agents = cfg.compare_agents;
  const auto table = koopsub::compare_speedup(cfg, agents, options(c));
  const auto dir = out_dir(c, cfg);
  koopsub::emit_speedup_data(table, dir);
  for (const auto& r : table.rows) {
    std::cout << "M = " << r.agents << "  equilibrium round " << r.equilibrium_round << "  flop ratio "
              << r.ratio << "\n";
  }
  std::cout << "wrote " << dir.string() << "\n";
  return Exit::ok;
}

int cmd_validate(const Common& c) {
  const auto errors = koopsub::schema::validate(koopsub::io::read_file(c.config_path),
                                                koopsub::schema::config_schema());
  if (!errors.empty()) {
    for (const auto& e : errors) std::cout << e << "\n";
    report_error("ConfigError", "schema validation failed with " + std::to_string(errors.size()) + " error(s)");
    return Exit::config;
  }
  load(c);
  std::cout << c.config_path << ": valid\n";
  return Exit::ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Koopman-invariant subspace identification with SSD and P-SSD"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, compare_opts, validate_opts;
  std::vector<int> compare_agents;
  auto* run = app.add_subcommand("run", "identify the subspace and write report and figure data");
  add_common(run, run_opts, true);
  auto* sweep = app.add_subcommand("sweep", "consensus rounds versus packet-drop probability");
  add_common(sweep, sweep_opts, true);
  auto* compare = app.add_subcommand("compare", "FLOP and round comparison across agent counts");
  add_common(compare, compare_opts, true);
  compare->add_option("--agents", compare_agents, "agent counts (default: config compare.agents)");
  auto* validate = app.add_subcommand("validate", "check a config against the published schema");
  add_common(validate, validate_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Exit::ok : Exit::config;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts);
    if (*compare) return cmd_compare(compare_opts, compare_agents);
    return cmd_validate(validate_opts);
  } catch (const koopsub::NoTermination& e) {
    report_error("NoTermination", e.what(), nlohmann::json::parse(koopsub::serial::to_json(e.report())));
    return Exit::no_termination;
  } catch (const koopsub::Error& e) {
    report_error(std::string(koopsub::to_string(e.code())), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    report_error("internal_error", e.what());
    return Exit::numerical;
  }
}
