#include "koopsub/serialization.hpp"

#include <json.hpp>

#include "koopsub/errors.hpp"

namespace koopsub::serial {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_error, std::string(what) + ": " + e.what());
  }
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_error, std::string(what) + ": " + e.what());
  }
}

json digraph_json(const Digraph& g) {
  json edges = json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
  return {{"node_count", g.node_count()}, {"edges", edges}};
}

Digraph digraph_of(const json& j) {
  std::vector<Digraph::Edge> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return Digraph(j.at("node_count").get<int>(), std::move(edges));
}

std::string dump(const json& j) { return j.dump(2); }

}  // namespace

std::string to_json(const MonomialDictionary& dict) {
  return dump({{"n_vars", dict.n_vars}, {"terms", dict.terms}, {"scales", dict.scales}});
}

MonomialDictionary dictionary_from_json(std::string_view text) {
  const json j = parse_json(text, "dictionary");
  return guarded("dictionary", [&] {
    const int n = j.at("n_vars").get<int>();
    if (j.contains("max_degree")) {
      MonomialDictionary d = monomials_up_to_degree(n, j.at("max_degree").get<int>());
      if (j.contains("scales")) {
        return make_dictionary(n, d.terms, j.at("scales").get<std::vector<double>>());
      }
      return d;
    }
    std::vector<double> scales;
    if (j.contains("scales")) scales = j.at("scales").get<std::vector<double>>();
    return make_dictionary(n, j.at("terms").get<std::vector<Exponents>>(), scales);
  });
}

std::string to_json(const Digraph& g) { return dump(digraph_json(g)); }

Digraph digraph_from_json(std::string_view text) {
  const json j = parse_json(text, "digraph");
  return guarded("digraph", [&] { return digraph_of(j); });
}

std::string to_json(const DigraphSchedule& s) {
  json j;
  switch (s.mode()) {
    case DigraphSchedule::Mode::fixed:
      j = {{"mode", "fixed"}, {"params", {{"graph", digraph_json(s.base())}}}};
      break;
    case DigraphSchedule::Mode::sequence: {
      json graphs = json::array();
      for (const auto& g : s.graphs()) graphs.push_back(digraph_json(g));
      j = {{"mode", "sequence"}, {"params", {{"graphs", graphs}}}};
      break;
    }
    case DigraphSchedule::Mode::dropped:
      j = {{"mode", "dropped"},
           {"params", {{"base", digraph_json(s.base())}, {"p", s.drop_probability()}}}};
      break;
  }
  j["seed"] = s.seed();
  return dump(j);
}

DigraphSchedule schedule_from_json(std::string_view text) {
  const json j = parse_json(text, "schedule");
  return guarded("schedule", [&] {
    const std::string mode = j.at("mode").get<std::string>();
    const json& p = j.at("params");
    if (mode == "fixed") return DigraphSchedule::fixed(digraph_of(p.at("graph")));
    if (mode == "sequence") {
      std::vector<Digraph> graphs;
      for (const auto& g : p.at("graphs")) graphs.push_back(digraph_of(g));
      return DigraphSchedule::sequence(std::move(graphs));
    }
    if (mode == "dropped") {
      return DigraphSchedule::dropped(digraph_of(p.at("base")), p.at("p").get<double>(),
                                      j.value("seed", std::uint64_t{0}));
    }
    throw Error(ErrorCode::io_error, "schedule: unknown mode '" + mode + "'");
  });
}

std::string to_json(const PssdRunReport& r) {
  auto opt = [](const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); };
  json rounds = json::array();
  for (const auto& rec : r.rounds) {
    rounds.push_back({{"round", rec.round},
                      {"flags", rec.flags},
                      {"cols", rec.cols},
                      {"agent_flops", rec.agent_flops},
                      {"messages", rec.messages},
                      {"consensus", rec.consensus ? json(*rec.consensus) : json(nullptr)}});
  }
  std::vector<Index> final_cols;
  for (const auto& c : r.final_c) final_cols.push_back(c.cols());
  return dump({{"status", to_string(r.status)},
               {"rounds_executed", r.rounds_executed},
               {"equilibrium_round", r.equilibrium_round},
               {"termination_round", opt(r.termination_round)},
               {"consensus_round", opt(r.consensus_round)},
               {"total_messages", r.total_messages},
               {"total_flops", r.total_flops},
               {"final_cols", final_cols},
               {"rounds", rounds}});
}

csv::Table coefficients_table(const std::vector<CoefficientMatrix>& cs) {
  csv::Table t({"agent", "row", "col", "value"});
  for (std::size_t a = 0; a < cs.size(); ++a) {
    if (cs[a].is_zero()) continue;
    const Matrix& m = cs[a].matrix();
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        t.add_row({std::to_string(a), std::to_string(i), std::to_string(j), csv::format_number(m(i, j))});
      }
    }
  }
  return t;
}

csv::Table eigenpair_table(const std::vector<Eigenpair>& pairs, const MonomialDictionary& dict) {
  csv::Table t({"pair", "lambda_re", "lambda_im", "lambda_abs", "lambda_arg", "term", "coeff_re",
                "coeff_im"});
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const Eigenpair& e = pairs[p];
    for (Index j = 0; j < e.dictionary_coeffs.size(); ++j) {
      t.add_row({std::to_string(p), csv::format_number(e.eigenvalue.real()),
                 csv::format_number(e.eigenvalue.imag()), csv::format_number(std::abs(e.eigenvalue)),
                 csv::format_number(std::arg(e.eigenvalue)), dict.term_name(j),
                 csv::format_number(e.dictionary_coeffs(j).real()),
                 csv::format_number(e.dictionary_coeffs(j).imag())});
    }
  }
  return t;
}

void write_snapshots(const SnapshotSet& set, const SnapshotSidecar& meta,
                     const std::filesystem::path& csv_path) {
  const Index n = set.state_dim();
  std::vector<std::string> header;
  for (Index i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
  for (Index i = 1; i <= n; ++i) header.push_back("y" + std::to_string(i));
  csv::Table t(header);
  for (Index r = 0; r < set.size(); ++r) {
    std::vector<std::string> row;
    for (Index i = 0; i < n; ++i) row.push_back(csv::format_number(set.x(r, i)));
    for (Index i = 0; i < n; ++i) row.push_back(csv::format_number(set.y(r, i)));
    t.add_row(std::move(row));
  }
  t.write(csv_path);
  const json side = {{"seed", meta.seed},
                     {"system", {{"kind", to_string(meta.system)},
                                 {"state_dim", meta.state_dim},
                                 {"dt", meta.dt}}},
                     {"signature_rows", set.signature_rows},
                     {"block", set.block}};
  io::write_file(csv_path.string() + ".json", side.dump(2));
}

SnapshotSet read_snapshots(const std::filesystem::path& csv_path, SnapshotSidecar* meta) {
  const auto rows = csv::parse(io::read_file(csv_path));
  if (rows.empty() || rows.front().size() % 2 != 0 || rows.front().empty()) {
    throw Error(ErrorCode::io_error, "snapshots: malformed header in " + csv_path.string());
  }
  const Index n = static_cast<Index>(rows.front().size() / 2);
  SnapshotSet set;
  set.x.resize(static_cast<Index>(rows.size()) - 1, n);
  set.y.resize(static_cast<Index>(rows.size()) - 1, n);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (static_cast<Index>(rows[r].size()) != 2 * n) {
      throw Error(ErrorCode::io_error, "snapshots: ragged row " + std::to_string(r));
    }
    for (Index i = 0; i < n; ++i) {
      set.x(r - 1, i) = csv::parse_number(rows[r][i]);
      set.y(r - 1, i) = csv::parse_number(rows[r][n + i]);
    }
  }
  const std::filesystem::path side_path = csv_path.string() + ".json";
  if (std::filesystem::exists(side_path)) {
    const json side = parse_json(io::read_file(side_path), "snapshot sidecar");
    guarded("snapshot sidecar", [&] {
      set.signature_rows = side.at("signature_rows").get<std::vector<Index>>();
      set.block = side.value("block", std::vector<int>{});
      if (meta) {
        meta->seed = side.at("seed").get<std::uint64_t>();
        const json& sys = side.at("system");
        meta->system = system_kind_from_string(sys.at("kind").get<std::string>());
        meta->state_dim = sys.at("state_dim").get<int>();
        meta->dt = sys.at("dt").get<double>();
        meta->signature_rows = set.signature_rows;
        meta->block = set.block;
      }
      return 0;
    });
  }
  return set;
}

}  // namespace koopsub::serial
