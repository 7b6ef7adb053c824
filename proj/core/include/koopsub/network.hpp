#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace koopsub {

// Directed graph on nodes 0..M-1. An edge (i, j) means i is an in-neighbor of
// j, i.e. j receives what i transmits. Self-loops are never stored.
class Digraph {
 public:
  using Edge = std::pair<int, int>;

  Digraph() = default;
  // Edges are deduplicated and sorted. Throws InvalidInput for self-loops or
  // out-of-range endpoints.
  explicit Digraph(int node_count, std::vector<Edge> edges = {});

  int node_count() const noexcept { return node_count_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool has_edge(int from, int to) const;
  // Sorted ascending.
  std::vector<int> in_neighbors(int node) const;
  std::vector<int> out_neighbors(int node) const;

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  int node_count_ = 0;
  std::vector<Edge> edges_;
};

// Edges (i, i+1 mod M); diameter M-1.
Digraph ring_digraph(int m);
// Every ordered pair i != j.
Digraph complete_digraph(int m);
// Edges (i, i+1) for i < M-1; the last node is globally reachable.
Digraph path_digraph(int m);

inline constexpr int kUnreachable = -1;

struct ConnectivityReport {
  bool strongly_connected = false;
  std::optional<int> diameter;            // set iff strongly connected
  std::vector<int> globally_reachable;    // sorted node ids
  // max_j dist(j, i) per node; nullopt when some node cannot reach i.
  std::vector<std::optional<int>> max_in_distance;
  // dist[i][j] = length of the shortest path from i to j, kUnreachable if none.
  std::vector<std::vector<int>> dist;
};

ConnectivityReport analyze(const Digraph& g);

// Edge-set composition E2 ∘ E1 = {(i, j) : (i, k) in E1 and (k, j) in E2 for
// some k}. Pairs (i, i) are kept, so folds over several sets stay associative.
std::vector<Digraph::Edge> compose_edges(int node_count,
                                         const std::vector<Digraph::Edge>& first,
                                         const std::vector<Digraph::Edge>& second);

// G2 ∘ G1 as a digraph; the (i, i) pairs of the edge-set composition are
// dropped since a Digraph stores no self-loops.
Digraph compose(const Digraph& first, const Digraph& second);

// True iff G_k ∘ ... ∘ G_1 is strongly connected.
bool is_jointly_strongly_connected(std::span<const Digraph> graphs);

// Communication topology as a function of the round k >= 1.
class DigraphSchedule {
 public:
  enum class Mode { fixed, sequence, dropped };

  static DigraphSchedule fixed(Digraph g);
  static DigraphSchedule sequence(std::vector<Digraph> graphs);
  // Each edge is independently absent at round k with probability p. The draw
  // for (k, edge) depends only on (seed, k, edge), so raising p removes a
  // superset of edges.
  static DigraphSchedule dropped(Digraph base, double p, std::uint64_t seed);

  Mode mode() const noexcept { return mode_; }
  int node_count() const noexcept { return graphs_.front().node_count(); }
  bool time_varying() const noexcept;
  double drop_probability() const noexcept { return p_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const Digraph& base() const noexcept { return graphs_.front(); }
  const std::vector<Digraph>& graphs() const noexcept { return graphs_; }

  Digraph edges_at(std::int64_t k) const;

 private:
  Mode mode_ = Mode::fixed;
  std::vector<Digraph> graphs_;
  double p_ = 0.0;
  std::uint64_t seed_ = 0;
};

}  // namespace koopsub
