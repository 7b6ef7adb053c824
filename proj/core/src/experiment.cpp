#include "koopsub/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "koopsub/csv.hpp"
#include "koopsub/errors.hpp"
#include "koopsub/flops.hpp"
#include "koopsub/schema.hpp"
#include "koopsub/serialization.hpp"
#include "koopsub/ssd.hpp"
#include "parallel.hpp"

namespace koopsub {

using json = nlohmann::json;

namespace {

constexpr double kRangeTol = 1e-8;

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::config_error, "config: " + msg);
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

Box box_of(const json& j) {
  Box b;
  for (const auto& pair : j) b.bounds.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  return b;
}

Topology topology_of(const std::string& s) {
  if (s == "ring") return Topology::ring;
  if (s == "complete") return Topology::complete;
  if (s == "path") return Topology::path;
  config_error("unknown topology " + s);
}

DynamicalSystem make_system(const ExperimentConfig& cfg) {
  switch (cfg.system) {
    case SystemKind::unstable_nonlinear: return DynamicalSystem::unstable_nonlinear();
    case SystemKind::piecewise_linear: return DynamicalSystem::piecewise_linear(cfg.system_dimension);
    case SystemKind::vanderpol: return DynamicalSystem::vanderpol(cfg.dt);
    case SystemKind::lorenz: return DynamicalSystem::lorenz(cfg.dt);
  }
  config_error("unknown system");
}

int state_dim_of(const ExperimentConfig& cfg) {
  switch (cfg.system) {
    case SystemKind::piecewise_linear: return cfg.system_dimension;
    case SystemKind::lorenz: return 3;
    default: return 2;
  }
}

void check_semantics(const ExperimentConfig& c) {
  const int n = state_dim_of(c);
  if (c.system == SystemKind::piecewise_linear && c.system_dimension < 1) {
    config_error("/system/dimension is required for piecewise_linear");
  }
  const Box space = make_system(c).state_space;
  auto check_box = [&](const Box& b, const std::string& where) {
    if (b.dim() != n) config_error(where + " must have " + std::to_string(n) + " intervals");
    for (const auto& [lo, hi] : b.bounds) {
      if (!(lo < hi)) config_error(where + " has an empty interval");
    }
  };
  if (c.region) {
    check_box(*c.region, "/data/region");
    if (!space.contains(*c.region)) config_error("/data/region leaves the state space");
  }
  if (c.sampling == ExperimentConfig::Sampling::regions) {
    if (c.system != SystemKind::piecewise_linear) config_error("region sampling needs piecewise_linear");
    if (c.signature.kind == SignaturePolicy::Kind::random) {
      config_error("region sampling supports signature kinds first and none");
    }
    if (c.samples_per_cell < 1) config_error("/data/samples_per_cell must be positive");
    if (c.signature.kind != SignaturePolicy::Kind::none && c.signature_samples < 1) {
      config_error("/data/signature_samples must be positive");
    }
  } else {
    if (c.samples < 1) config_error("/data/samples must be positive");
    if (c.signature.count > c.samples) config_error("/signature/count exceeds /data/samples");
  }
  if (c.partition.kind == PartitionPolicy::Kind::per_region) {
    if (c.sampling != ExperimentConfig::Sampling::regions) config_error("per_region partition needs region sampling");
    if (c.agents != c.system_dimension) config_error("per_region partition needs one agent per cell");
  }
  if (c.partition.kind == PartitionPolicy::Kind::weighted &&
      static_cast<int>(c.partition.weights.size()) != c.agents) {
    config_error("/partition/weights needs one entry per agent");
  }
  if (c.evaluation.trajectories > 0) {
    if (c.evaluation.length < 1) config_error("/evaluation/length must be positive");
    if (c.evaluation.region) {
      check_box(*c.evaluation.region, "/evaluation/region");
      if (!space.contains(*c.evaluation.region)) config_error("/evaluation/region leaves the state space");
    }
  }
  if (c.heatmap) {
    if (n != 2) config_error("/heatmap needs a two-dimensional state");
    check_box(c.heatmap->region, "/heatmap/region");
  }
  try {
    c.tol.validate();
  } catch (const Error& e) {
    config_error(std::string("/tolerances: ") + e.what());
  }
}

json quartiles_json(const QuartileSeries& q) {
  return {{"median", q.median}, {"q1", q.q1}, {"q3", q.q3}};
}

json errors_json(const ErrorSummary& e) {
  return {{"relative_percent", quartiles_json(e.relative)}, {"angle_rad", quartiles_json(e.angle)}};
}

json wall_json(const std::map<std::string, double>& w) {
  json out = json::object();
  for (const auto& [k, v] : w) out[k] = v;
  return out;
}

Region eval_region(const ExperimentConfig& cfg, const DynamicalSystem& sys) {
  return Region::of(cfg.evaluation.region.value_or(sys.state_space));
}

// Index of the eigenpair shown in the heat map: largest |lambda| other than the
// trivial eigenvalue 1, upper half plane only.
std::size_t leading_nontrivial(const std::vector<Eigenpair>& pairs) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Complex l = pairs[i].eigenvalue;
    if (std::abs(l - 1.0) <= 1e-6 || l.imag() < 0.0) continue;
    if (std::abs(l) > best_abs) {
      best_abs = std::abs(l);
      best = i;
    }
  }
  return best;
}

std::vector<AgentData> agent_data_for(const PreparedData& d, const ExperimentConfig& cfg, int m) {
  PartitionPolicy policy = cfg.partition;
  policy.require_signature = cfg.signature.kind != SignaturePolicy::Kind::none;
  return make_agent_data(d.snapshots, d.dictionary,
                         partition_data(d.snapshots, d.dictionary, m, policy, cfg.tol));
}

SsdResult centralized(const Matrix& dx, const Matrix& dy, const ExperimentConfig& cfg) {
  return cfg.approximate ? approx_ssd(dx, dy, cfg.tol.eps_approx, cfg.tol) : ssd(dx, dy, cfg.tol);
}

PssdOptions pssd_options(const ExperimentConfig& cfg, const RunOptions& opts) {
  PssdOptions o;
  o.max_rounds = cfg.max_rounds;
  o.window = cfg.window;
  if (cfg.approximate) o.eps_approx = cfg.tol.eps_approx;
  o.threads = opts.threads;
  o.shared_bus = cfg.shared_bus;
  o.consensus_tol = kRangeTol;
  return o;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

ExperimentConfig ExperimentConfig::parse(std::string_view json_text) {
  const auto problems = schema::validate(json_text, schema::config_schema());
  if (!problems.empty()) {
    std::string msg = "schema validation failed";
    for (const auto& p : problems) msg += "; " + p;
    config_error(msg);
  }
  ExperimentConfig c;
  try {
    const json j = json::parse(json_text);
    c.name = j.at("name").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();

    const json& sys = j.at("system");
    c.system = system_kind_from_string(sys.at("kind").get<std::string>());
    c.system_dimension = sys.value("dimension", 0);
    c.dt = sys.value("dt", 0.05);

    const json& data = j.at("data");
    const std::string sampling = data.at("sampling").get<std::string>();
    c.sampling = sampling == "uniform"        ? Sampling::uniform
                 : sampling == "trajectories" ? Sampling::trajectories
                                              : Sampling::regions;
    if (data.contains("region")) c.region = box_of(data.at("region"));
    c.samples = data.value("samples", Index{0});
    c.full_samples = data.value("full_samples", c.samples);
    c.steps_per_trajectory = data.value("steps_per_trajectory", Index{100});
    c.full_steps_per_trajectory = data.value("full_steps_per_trajectory", c.steps_per_trajectory);
    c.signature_outside_cells_from = data.value("signature_outside_cells_from", 2);
    c.signature_samples = data.value("signature_samples", Index{0});
    c.samples_per_cell = data.value("samples_per_cell", Index{0});
    c.full_samples_per_cell = data.value("full_samples_per_cell", c.samples_per_cell);

    const json& dict = j.at("dictionary");
    c.max_degree = dict.at("max_degree").get<int>();
    c.balance = dict.value("balance", false);

    const json& sig = j.at("signature");
    const std::string sk = sig.at("kind").get<std::string>();
    c.signature.kind = sk == "first"    ? SignaturePolicy::Kind::first
                       : sk == "random" ? SignaturePolicy::Kind::random
                                        : SignaturePolicy::Kind::none;
    c.signature.count = sig.value("count", Index{0});

    c.agents = j.at("agents").get<int>();
    if (j.contains("partition")) {
      const json& p = j.at("partition");
      const std::string pk = p.at("kind").get<std::string>();
      c.partition.kind = pk == "even"       ? PartitionPolicy::Kind::even
                         : pk == "weighted" ? PartitionPolicy::Kind::weighted
                                            : PartitionPolicy::Kind::per_region;
      c.partition.weights = p.value("weights", std::vector<double>{});
    }

    const json& net = j.at("network");
    c.topology = topology_of(net.at("topology").get<std::string>());
    c.drop_probability = net.value("drop_probability", 0.0);
    c.shared_bus = net.value("shared_bus", false);

    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      c.tol.rank_rtol = t.value("rank_rtol", c.tol.rank_rtol);
      c.tol.eps_cap = t.value("eps_intersection", c.tol.eps_cap);
      c.tol.eps_approx = t.value("eps", c.tol.eps_approx);
    }
    c.approximate = j.value("approximate", false);
    c.max_rounds = j.value("max_rounds", std::int64_t{100});
    if (j.contains("window")) c.window = j.at("window").get<std::int64_t>();

    if (j.contains("evaluation")) {
      const json& e = j.at("evaluation");
      c.evaluation.trajectories = e.value("trajectories", Index{0});
      c.evaluation.length = e.value("length", Index{0});
      if (e.contains("region")) c.evaluation.region = box_of(e.at("region"));
    }
    if (j.contains("heatmap")) {
      const json& h = j.at("heatmap");
      c.heatmap = Heatmap{box_of(h.at("region")), h.at("resolution").get<int>()};
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      c.sweep = Sweep{s.at("drop_probabilities").get<std::vector<double>>(), s.value("seeds", 1),
                      s.value("max_rounds", std::int64_t{500})};
    }
    if (j.contains("compare")) c.compare_agents = j.at("compare").at("agents").get<std::vector<int>>();
  } catch (const json::exception& e) {
    config_error(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config_error) throw;
    config_error(e.what());
  }
  check_semantics(c);
  return c;
}

// ---------------------------------------------------------------------------
// Data

DigraphSchedule make_schedule(Topology topology, int agents, double p, std::uint64_t seed) {
  if (agents == 1) return DigraphSchedule::fixed(Digraph(1));
  Digraph base;
  switch (topology) {
    case Topology::ring: base = ring_digraph(agents); break;
    case Topology::complete: base = complete_digraph(agents); break;
    case Topology::path: base = path_digraph(agents); break;
  }
  if (p == 0.0) return DigraphSchedule::fixed(std::move(base));
  return DigraphSchedule::dropped(std::move(base), p, seed);
}

PreparedData prepare_data(const ExperimentConfig& cfg, const RunOptions& opts) {
  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  PreparedData d{make_system(cfg), {}, {}};
  const DynamicalSystem& sys = d.system;

  if (cfg.sampling == ExperimentConfig::Sampling::regions) {
    const int n = sys.state_dim;
    const Index per_cell = opts.full ? cfg.full_samples_per_cell : cfg.samples_per_cell;
    const bool with_signature = cfg.signature.kind != SignaturePolicy::Kind::none;
    std::vector<SnapshotSet> parts;
    if (with_signature) {
      parts.push_back(generate_snapshots(
          sys, Region::outside_cells(n, cfg.signature_outside_cells_from), cfg.signature_samples,
          make_engine(seed, Stream::data, 0)(),
          {SignaturePolicy::Kind::first, cfg.signature_samples}));
    }
    for (int k = 1; k <= n; ++k) {
      parts.push_back(generate_snapshots(sys, Region::inside_cell(n, k), per_cell,
                                         make_engine(seed, Stream::data, k)(), {}));
    }
    d.snapshots = concat(parts);
    if (with_signature) {
      for (int& b : d.snapshots.block) b -= 1;
    }
  } else {
    const Region region = Region::of(cfg.region.value_or(sys.state_space));
    const Index samples = opts.full ? cfg.full_samples : cfg.samples;
    TrajectorySampling traj;
    traj.steps_per_trajectory =
        opts.full ? cfg.full_steps_per_trajectory : cfg.steps_per_trajectory;
    d.snapshots = generate_snapshots(sys, region, samples, seed, cfg.signature, traj);
  }

  d.dictionary = monomials_up_to_degree(sys.state_dim, cfg.max_degree);
  if (cfg.balance) d.dictionary = balance_scales(d.dictionary, d.snapshots.x, d.snapshots.y);
  return d;
}

// ---------------------------------------------------------------------------
// Single run

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  ExperimentReport r;
  r.name = cfg.name;
  r.seed = opts.seed.value_or(cfg.seed);

  Stopwatch total;
  Stopwatch phase;
  const PreparedData d = prepare_data(cfg, opts);
  r.wall_seconds["data"] = phase.seconds();
  r.samples = d.snapshots.size();
  r.dictionary = d.dictionary;
  r.dictionary_size = d.dictionary.size();

  const Matrix dx = evaluate(d.dictionary, d.snapshots.x);
  const Matrix dy = evaluate(d.dictionary, d.snapshots.y);

  phase = Stopwatch();
  SsdResult central;
  {
    flops::FlopScope scope;
    central = centralized(dx, dy, cfg);
    r.ssd_flops = scope.elapsed();
  }
  r.wall_seconds["ssd"] = phase.seconds();
  r.ssd_dimension = central.c.cols();
  r.ssd_iterations = central.trace.iterations.size();

  phase = Stopwatch();
  const std::vector<AgentData> data = agent_data_for(d, cfg, cfg.agents);
  PssdOptions po = pssd_options(cfg, opts);
  po.oracle = central.c;
  const DigraphSchedule schedule = make_schedule(
      cfg.topology, cfg.agents, cfg.drop_probability, make_engine(r.seed, Stream::drops, 0)());
  r.pssd = run_pssd(data, schedule, cfg.tol, po);
  r.wall_seconds["pssd"] = phase.seconds();

  const CoefficientMatrix& c = r.pssd.final_c.front();
  r.dimension = c.cols();
  r.agents_agree = std::all_of(r.pssd.final_c.begin(), r.pssd.final_c.end(),
                               [&](const CoefficientMatrix& ci) { return linalg::range_equal(ci, c, kRangeTol); });
  r.matches_ssd = linalg::range_equal(c, central.c, kRangeTol);

  if (r.dimension != r.ssd_dimension) {
    const std::string what = "P-SSD identified dimension " + std::to_string(r.dimension) +
                             " but the union-data SSD subspace has dimension " +
                             std::to_string(r.ssd_dimension);
    r.annotations.push_back(cfg.approximate ? "approximate: " + what : "FAILURE-MODE: " + what);
  }
  if (!r.agents_agree) r.annotations.push_back("agents disagree on the final subspace");
  if (central.trace.rank_repaired) r.annotations.push_back("SSD repaired a rank-deficient null-space block");

  if (c.is_zero()) {
    r.annotations.push_back("empty subspace: no eigenpairs or predictions");
    r.wall_seconds["total"] = total.seconds();
    return r;
  }

  phase = Stopwatch();
  const ReducedDictionary reduced = reduce(d.dictionary, c, cfg.tol);
  const Matrix k_reduced =
      prediction_matrix(reduced.evaluate(d.snapshots.x), reduced.evaluate(d.snapshots.y), cfg.tol);
  r.eigenpairs = eigenpairs(k_reduced, c);
  for (const auto& p : r.eigenpairs) {
    r.eigenvalues.push_back({p.eigenvalue, verify_linear_evolution(p.dictionary_coeffs, p.eigenvalue, dx, dy)});
  }
  r.wall_seconds["eigen"] = phase.seconds();

  if (cfg.evaluation.trajectories > 0) {
    phase = Stopwatch();
    const Matrix k_original = prediction_matrix(dx, dy, cfg.tol);
    const Region region = eval_region(cfg, d.system);
    const int count = static_cast<int>(cfg.evaluation.trajectories);
    std::vector<PredictionErrorSeries> red(count), orig(count);
    detail::parallel_for(count, opts.threads, [&](int t) {
      auto engine = make_engine(r.seed, Stream::trajectories, static_cast<std::uint64_t>(t));
      const Vector x0 = sample_point(region, engine);
      const Matrix traj = generate_trajectory(d.system, x0, cfg.evaluation.length);
      red[t] = error_series(reduced, k_reduced, traj);
      orig[t] = error_series(d.dictionary, k_original, traj);
    });
    auto summarize = [](const std::vector<PredictionErrorSeries>& s) {
      std::vector<std::vector<double>> rel, ang;
      for (const auto& e : s) {
        rel.push_back(e.relative);
        ang.push_back(e.angle);
      }
      return ErrorSummary{quartile_summary(rel), quartile_summary(ang)};
    };
    r.reduced_errors = summarize(red);
    r.original_errors = summarize(orig);
    r.wall_seconds["evaluation"] = phase.seconds();
  }

  if (cfg.heatmap && !r.eigenpairs.empty()) {
    phase = Stopwatch();
    const auto& h = *cfg.heatmap;
    const Eigenpair& p = r.eigenpairs[leading_nontrivial(r.eigenpairs)];
    const int res = h.resolution;
    Matrix points(static_cast<Index>(res) * res, 2);
    auto lattice = [res](const std::pair<double, double>& b, int i) {
      return res == 1 ? 0.5 * (b.first + b.second)
                      : b.first + (b.second - b.first) * static_cast<double>(i) / (res - 1);
    };
    for (int i = 0; i < res; ++i) {
      for (int jj = 0; jj < res; ++jj) {
        points(static_cast<Index>(i) * res + jj, 0) = lattice(h.region.bounds[0], i);
        points(static_cast<Index>(i) * res + jj, 1) = lattice(h.region.bounds[1], jj);
      }
    }
    const CVector phi = evaluate_eigenfunction(d.dictionary, p.dictionary_coeffs, points);
    HeatmapGrid grid;
    grid.eigenvalue = p.eigenvalue;
    for (Index row = 0; row < points.rows(); ++row) {
      grid.x1.push_back(points(row, 0));
      grid.x2.push_back(points(row, 1));
      grid.magnitude.push_back(std::abs(phi(row)));
      grid.phase.push_back(std::arg(phi(row)));
    }
    r.heatmap = std::move(grid);
    r.wall_seconds["heatmap"] = phase.seconds();
  }

  r.wall_seconds["total"] = total.seconds();
  return r;
}

std::string ExperimentReport::to_json() const {
  json j;
  j["name"] = name;
  j["seed"] = seed;
  j["samples"] = samples;
  j["dictionary_size"] = dictionary_size;
  j["dictionary"] = json::parse(serial::to_json(dictionary));
  j["ssd"] = {{"dimension", ssd_dimension}, {"iterations", ssd_iterations}, {"flops", ssd_flops}};
  j["pssd"] = json::parse(serial::to_json(pssd));
  j["dimension"] = dimension;
  j["agents_agree"] = agents_agree;
  j["matches_ssd"] = matches_ssd;
  json ev = json::array();
  for (const auto& e : eigenvalues) {
    ev.push_back({{"re", e.eigenvalue.real()},
                  {"im", e.eigenvalue.imag()},
                  {"abs", std::abs(e.eigenvalue)},
                  {"arg", std::arg(e.eigenvalue)},
                  {"residual", e.residual}});
  }
  j["eigenvalues"] = std::move(ev);
  if (reduced_errors) j["errors"]["reduced"] = errors_json(*reduced_errors);
  if (original_errors) j["errors"]["original"] = errors_json(*original_errors);
  if (heatmap) {
    j["heatmap"] = {{"eigenvalue_re", heatmap->eigenvalue.real()},
                    {"eigenvalue_im", heatmap->eigenvalue.imag()},
                    {"points", heatmap->x1.size()}};
  }
  j["annotations"] = annotations;
  return j.dump(2) + "\n";
}

std::string ExperimentReport::timing_json() const {
  return wall_json(wall_seconds).dump(2) + "\n";
}

void emit_plot_data(const ExperimentReport& report, const std::filesystem::path& dir) {
  io::write_file(dir / "report.json", report.to_json());
  io::write_file(dir / "timing.json", report.timing_json());
  serial::coefficients_table(report.pssd.final_c).write(dir / "coefficients.csv");
  serial::eigenpair_table(report.eigenpairs, report.dictionary).write(dir / "eigenpairs.csv");

  if (report.reduced_errors && report.original_errors) {
    csv::Table t({"method", "metric", "k", "median", "q1", "q3"});
    auto add = [&](const std::string& method, const std::string& metric, const QuartileSeries& q) {
      for (std::size_t k = 1; k < q.median.size(); ++k) {
        t.add_row({method, metric, std::to_string(k), csv::format_number(q.median[k]),
                   csv::format_number(q.q1[k]), csv::format_number(q.q3[k])});
      }
    };
    add("reduced", "relative_percent", report.reduced_errors->relative);
    add("reduced", "angle_rad", report.reduced_errors->angle);
    add("original", "relative_percent", report.original_errors->relative);
    add("original", "angle_rad", report.original_errors->angle);
    t.write(dir / "fig_errors.csv");
  }
  if (report.heatmap) {
    const auto& h = *report.heatmap;
    csv::Table t({"x1", "x2", "abs", "arg"});
    for (std::size_t i = 0; i < h.x1.size(); ++i) {
      t.add_row({csv::format_number(h.x1[i]), csv::format_number(h.x2[i]),
                 csv::format_number(h.magnitude[i]), csv::format_number(h.phase[i])});
    }
    t.write(dir / "fig_heatmap.csv");
  }
}

// ---------------------------------------------------------------------------
// Drop sweep

SweepReport run_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!cfg.sweep) config_error("/sweep is required for the sweep command");
  const auto& sw = *cfg.sweep;
  SweepReport r;
  r.name = cfg.name;
  r.seed = opts.seed.value_or(cfg.seed);

  Stopwatch phase;
  const PreparedData d = prepare_data(cfg, opts);
  const Matrix dx = evaluate(d.dictionary, d.snapshots.x);
  const Matrix dy = evaluate(d.dictionary, d.snapshots.y);
  const SsdResult oracle = centralized(dx, dy, cfg);
  r.oracle_dimension = oracle.c.cols();
  const std::vector<AgentData> data = agent_data_for(d, cfg, cfg.agents);
  r.wall_seconds["setup"] = phase.seconds();

  PssdOptions po = pssd_options(cfg, opts);
  po.oracle = oracle.c;
  po.stop_at_consensus = true;
  po.max_rounds = sw.max_rounds;
  // Under heavy drops long quiet stretches are normal; only consensus or the
  // round cap end a trial.
  po.window = sw.max_rounds + 1;

  phase = Stopwatch();
  for (double p : sw.drop_probabilities) {
    SweepPoint pt;
    pt.p = p;
    for (int s = 0; s < sw.seeds; ++s) {
      const auto schedule = make_schedule(cfg.topology, cfg.agents, p,
                                          make_engine(r.seed, Stream::drops, static_cast<std::uint64_t>(s))());
      PssdRunReport rep;
      try {
        rep = run_pssd(data, schedule, cfg.tol, po);
      } catch (const NoTermination& e) {
        rep = e.report();
      }
      pt.rounds.push_back(rep.consensus_round.value_or(-1));
      pt.dims.push_back(rep.final_c.front().cols());
    }
    pt.all_consensus = std::none_of(pt.rounds.begin(), pt.rounds.end(), [](std::int64_t v) { return v < 0; });
    double sum = 0.0;
    int ok = 0;
    for (auto v : pt.rounds) {
      if (v >= 0) {
        sum += static_cast<double>(v);
        ++ok;
      }
    }
    pt.mean_rounds = ok > 0 ? sum / ok : 0.0;
    r.points.push_back(std::move(pt));
  }
  r.wall_seconds["trials"] = phase.seconds();
  return r;
}

std::string SweepReport::to_json() const {
  json j;
  j["name"] = name;
  j["seed"] = seed;
  j["oracle_dimension"] = oracle_dimension;
  json pts = json::array();
  for (const auto& p : points) {
    pts.push_back({{"p", p.p},
                   {"mean_rounds", p.mean_rounds},
                   {"all_consensus", p.all_consensus},
                   {"rounds", p.rounds},
                   {"dimensions", p.dims}});
  }
  j["points"] = std::move(pts);
  return j.dump(2) + "\n";
}

void emit_sweep_data(const SweepReport& report, const std::filesystem::path& dir) {
  io::write_file(dir / "sweep.json", report.to_json());
  io::write_file(dir / "timing.json", wall_json(report.wall_seconds).dump(2) + "\n");
  csv::Table trials({"p", "trial", "consensus_round", "dimension"});
  csv::Table bars({"p", "mean_rounds", "min_rounds", "max_rounds", "trials", "failures"});
  for (const auto& p : report.points) {
    std::int64_t lo = -1, hi = -1;
    int failures = 0;
    for (std::size_t s = 0; s < p.rounds.size(); ++s) {
      trials.add_row({csv::format_number(p.p), std::to_string(s), std::to_string(p.rounds[s]),
                      std::to_string(p.dims[s])});
      if (p.rounds[s] < 0) {
        ++failures;
        continue;
      }
      lo = lo < 0 ? p.rounds[s] : std::min(lo, p.rounds[s]);
      hi = std::max(hi, p.rounds[s]);
    }
    bars.add_row({csv::format_number(p.p), csv::format_number(p.mean_rounds), std::to_string(lo),
                  std::to_string(hi), std::to_string(p.rounds.size()), std::to_string(failures)});
  }
  trials.write(dir / "sweep.csv");
  bars.write(dir / "fig_consensus.csv");
}

// ---------------------------------------------------------------------------
// Speedup

SpeedupTable compare_speedup(const ExperimentConfig& cfg, const std::vector<int>& agent_counts,
                             const RunOptions& opts) {
  if (agent_counts.empty()) config_error("compare needs at least one agent count");
  SpeedupTable table;
  table.name = cfg.name;
  const PreparedData d = prepare_data(cfg, opts);
  const Matrix dx = evaluate(d.dictionary, d.snapshots.x);
  const Matrix dy = evaluate(d.dictionary, d.snapshots.y);

  std::uint64_t ssd_flops = 0;
  Stopwatch ssd_clock;
  {
    flops::FlopScope scope;
    centralized(dx, dy, cfg);
    ssd_flops = scope.elapsed();
  }
  const double wall_ssd = ssd_clock.seconds();

  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  for (int m : agent_counts) {
    if (m < 1) config_error("agent counts must be positive");
    ExperimentConfig local = cfg;
    local.agents = m;
    if (local.partition.kind != PartitionPolicy::Kind::even) local.partition = PartitionPolicy{};
    const auto data = agent_data_for(d, local, m);
    const auto schedule = make_schedule(cfg.topology, m, cfg.drop_probability, make_engine(seed, Stream::drops, 0)());
    Stopwatch clock;
    const PssdRunReport rep = run_pssd(data, schedule, cfg.tol, pssd_options(local, opts));
    SpeedupRow row;
    row.agents = m;
    row.wall_pssd = clock.seconds();
    row.wall_ssd = wall_ssd;
    row.equilibrium_round = rep.equilibrium_round;
    row.termination_round = rep.termination_round;
    for (const auto& rr : rep.rounds) {
      const std::uint64_t worst = *std::max_element(rr.agent_flops.begin(), rr.agent_flops.end());
      row.max_round_flops = std::max(row.max_round_flops, worst);
      if (rr.round <= std::max<std::int64_t>(rep.equilibrium_round, 1)) row.pssd_flops += worst;
    }
    row.ssd_flops = ssd_flops;
    row.ratio = row.pssd_flops > 0 ? static_cast<double>(ssd_flops) / static_cast<double>(row.pssd_flops) : 0.0;
    table.rows.push_back(row);
  }
  return table;
}

std::string SpeedupTable::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) {
    json row = {{"agents", r.agents},
                {"equilibrium_round", r.equilibrium_round},
                {"pssd_flops", r.pssd_flops},
                {"max_round_flops", r.max_round_flops},
                {"ssd_flops", r.ssd_flops},
                {"ratio", r.ratio}};
    row["termination_round"] = r.termination_round ? json(*r.termination_round) : json(nullptr);
    rows_json.push_back(std::move(row));
  }
  return json{{"name", name}, {"rows", std::move(rows_json)}}.dump(2) + "\n";
}

void emit_speedup_data(const SpeedupTable& table, const std::filesystem::path& dir) {
  io::write_file(dir / "speedup.json", table.to_json());
  json timing = json::array();
  csv::Table t({"agents", "equilibrium_round", "termination_round", "pssd_flops", "max_round_flops",
                "ssd_flops", "ratio"});
  for (const auto& r : table.rows) {
    t.add_row({std::to_string(r.agents), std::to_string(r.equilibrium_round),
               r.termination_round ? std::to_string(*r.termination_round) : std::string{},
               std::to_string(r.pssd_flops), std::to_string(r.max_round_flops), std::to_string(r.ssd_flops),
               csv::format_number(r.ratio)});
    timing.push_back({{"agents", r.agents}, {"pssd_seconds", r.wall_pssd}, {"ssd_seconds", r.wall_ssd}});
  }
  t.write(dir / "speedup.csv");
  io::write_file(dir / "timing.json", timing.dump(2) + "\n");
}

}  // namespace koopsub
