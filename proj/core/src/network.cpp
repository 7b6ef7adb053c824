#include "koopsub/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "koopsub/dynamics.hpp"
#include "koopsub/errors.hpp"

namespace koopsub {

Digraph::Digraph(int node_count, std::vector<Edge> edges) : node_count_(node_count) {
  if (node_count < 0) throw Error(ErrorCode::invalid_input, "Digraph: negative node count");
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= node_count || j >= node_count) {
      throw Error(ErrorCode::invalid_input, "Digraph: edge endpoint out of range");
    }
    if (i == j) throw Error(ErrorCode::invalid_input, "Digraph: self-loops are not stored");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
}

bool Digraph::has_edge(int from, int to) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

std::vector<int> Digraph::in_neighbors(int node) const {
  std::vector<int> out;
  for (const auto& [i, j] : edges_) {
    if (j == node) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Digraph::out_neighbors(int node) const {
  std::vector<int> out;
  for (const auto& [i, j] : edges_) {
    if (i == node) out.push_back(j);
  }
  return out;
}

Digraph ring_digraph(int m) {
  if (m < 2) throw Error(ErrorCode::invalid_input, "ring_digraph: need at least 2 nodes");
  std::vector<Digraph::Edge> e;
  for (int i = 0; i < m; ++i) e.emplace_back(i, (i + 1) % m);
  return Digraph(m, std::move(e));
}

Digraph complete_digraph(int m) {
  if (m < 1) throw Error(ErrorCode::invalid_input, "complete_digraph: need at least 1 node");
  std::vector<Digraph::Edge> e;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i != j) e.emplace_back(i, j);
    }
  }
  return Digraph(m, std::move(e));
}

Digraph path_digraph(int m) {
  if (m < 1) throw Error(ErrorCode::invalid_input, "path_digraph: need at least 1 node");
  std::vector<Digraph::Edge> e;
  for (int i = 0; i + 1 < m; ++i) e.emplace_back(i, i + 1);
  return Digraph(m, std::move(e));
}

ConnectivityReport analyze(const Digraph& g) {
  const int m = g.node_count();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
  for (const auto& [i, j] : g.edges()) adj[static_cast<std::size_t>(i)].push_back(j);

  ConnectivityReport rep;
  rep.dist.assign(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m), kUnreachable));
  for (int s = 0; s < m; ++s) {
    auto& d = rep.dist[static_cast<std::size_t>(s)];
    d[static_cast<std::size_t>(s)] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (d[static_cast<std::size_t>(v)] == kUnreachable) {
          d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
  }

  rep.max_in_distance.resize(static_cast<std::size_t>(m));
  int diameter = 0;
  for (int i = 0; i < m; ++i) {
    int worst = 0;
    bool reachable = true;
    for (int j = 0; j < m; ++j) {
      const int dji = rep.dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      if (dji == kUnreachable) {
        reachable = false;
        break;
      }
      worst = std::max(worst, dji);
    }
    if (reachable) {
      rep.globally_reachable.push_back(i);
      rep.max_in_distance[static_cast<std::size_t>(i)] = worst;
      diameter = std::max(diameter, worst);
    }
  }
  rep.strongly_connected = m > 0 && static_cast<int>(rep.globally_reachable.size()) == m;
  if (rep.strongly_connected) rep.diameter = diameter;
  return rep;
}

std::vector<Digraph::Edge> compose_edges(int node_count,
                                         const std::vector<Digraph::Edge>& first,
                                         const std::vector<Digraph::Edge>& second) {
  const auto n = static_cast<std::size_t>(node_count);
  std::vector<std::vector<int>> out_second(n);
  for (const auto& [k, j] : second) out_second.at(static_cast<std::size_t>(k)).push_back(j);
  std::vector<Digraph::Edge> e;
  for (const auto& [i, k] : first) {
    for (int j : out_second.at(static_cast<std::size_t>(k))) e.emplace_back(i, j);
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

Digraph compose(const Digraph& first, const Digraph& second) {
  if (first.node_count() != second.node_count()) {
    throw Error(ErrorCode::invalid_input, "compose: node counts differ");
  }
  auto e = compose_edges(first.node_count(), first.edges(), second.edges());
  std::erase_if(e, [](const Digraph::Edge& edge) { return edge.first == edge.second; });
  return Digraph(first.node_count(), std::move(e));
}

bool is_jointly_strongly_connected(std::span<const Digraph> graphs) {
  if (graphs.empty()) throw Error(ErrorCode::invalid_input, "is_jointly_strongly_connected: empty list");
  const int n = graphs.front().node_count();
  std::vector<Digraph::Edge> acc = graphs.front().edges();
  for (std::size_t i = 1; i < graphs.size(); ++i) {
    if (graphs[i].node_count() != n) {
      throw Error(ErrorCode::invalid_input, "is_jointly_strongly_connected: node counts differ");
    }
    acc = compose_edges(n, acc, graphs[i].edges());
  }
  std::erase_if(acc, [](const Digraph::Edge& edge) { return edge.first == edge.second; });
  return analyze(Digraph(n, std::move(acc))).strongly_connected;
}

DigraphSchedule DigraphSchedule::fixed(Digraph g) {
  DigraphSchedule s;
  s.mode_ = Mode::fixed;
  s.graphs_.push_back(std::move(g));
  return s;
}

DigraphSchedule DigraphSchedule::sequence(std::vector<Digraph> graphs) {
  if (graphs.empty()) throw Error(ErrorCode::invalid_input, "DigraphSchedule::sequence: empty list");
  for (const auto& g : graphs) {
    if (g.node_count() != graphs.front().node_count()) {
      throw Error(ErrorCode::invalid_input, "DigraphSchedule::sequence: node counts differ");
    }
  }
  DigraphSchedule s;
  s.mode_ = Mode::sequence;
  s.graphs_ = std::move(graphs);
  return s;
}

DigraphSchedule DigraphSchedule::dropped(Digraph base, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw Error(ErrorCode::invalid_input, "DigraphSchedule::dropped: need 0 <= p < 1");
  }
  DigraphSchedule s;
  s.mode_ = Mode::dropped;
  s.graphs_.push_back(std::move(base));
  s.p_ = p;
  s.seed_ = seed;
  return s;
}

bool DigraphSchedule::time_varying() const noexcept {
  switch (mode_) {
    case Mode::fixed: return false;
    case Mode::sequence: return graphs_.size() > 1;
    case Mode::dropped: return p_ > 0.0;
  }
  return true;
}

Digraph DigraphSchedule::edges_at(std::int64_t k) const {
  if (k < 1) throw Error(ErrorCode::invalid_input, "edges_at: rounds start at 1");
  switch (mode_) {
    case Mode::fixed: return graphs_.front();
    case Mode::sequence:
      return graphs_[static_cast<std::size_t>((k - 1) % static_cast<std::int64_t>(graphs_.size()))];
    case Mode::dropped: {
      const Digraph& base = graphs_.front();
      if (p_ == 0.0) return base;
      auto engine = make_engine(seed_, Stream::drops, static_cast<std::uint64_t>(k));
      std::vector<Digraph::Edge> kept;
      for (const auto& e : base.edges()) {
        if (uniform01(engine) >= p_) kept.push_back(e);
      }
      return Digraph(base.node_count(), std::move(kept));
    }
  }
  throw Error(ErrorCode::internal_error, "edges_at: unknown mode");
}

}  // namespace koopsub
