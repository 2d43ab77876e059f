#pragma once

// Undirected simple-graph snapshots and ordered snapshot series.
//
// Nodes and adjacency lists are kept sorted by NodeId so every traversal in
// the toolkit is ascending and reproducible.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netmeta {

struct NodeId {
  std::uint64_t value{0};

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

// Canonical undirected edge: lo < hi.
struct Edge {
  NodeId lo;
  NodeId hi;

  // Orders the endpoints; throws SelfLoop when a == b.
  static Edge make(NodeId a, NodeId b);

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using NodePair = std::pair<NodeId, NodeId>;

// Calendar month label T(i), written YYYYMM.
struct YearMonth {
  int year{0};
  int month{0};

  static YearMonth parse(std::string_view text);
  static bool valid(int year, int month) { return year >= 0 && year <= 9999 && month >= 1 && month <= 12; }

  // Months since year 0; differences give window lengths.
  int ordinal() const { return year * 12 + (month - 1); }
  static YearMonth from_ordinal(int ordinal) { return {ordinal / 12, ordinal % 12 + 1}; }
  YearMonth next() const { return from_ordinal(ordinal() + 1); }
  std::string str() const;

  friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

class Graph {
 public:
  Graph() = default;

  // Canonicalizes and deduplicates the pairs; the node set is the endpoints
  // plus the isolates. Throws SelfLoop on a pair (u, u).
  static Graph from_pairs(std::span<const NodePair> pairs, std::span<const NodeId> isolates = {});
  static Graph from_edges(std::vector<Edge> edges, std::span<const NodeId> isolates = {});

  std::span<const NodeId> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  bool contains(NodeId u) const { return position(u).has_value(); }
  bool has_edge(NodeId a, NodeId b) const;
  bool has_edge(const Edge& e) const { return has_edge(e.lo, e.hi); }

  // Sorted neighbor list; throws UnknownNode.
  std::span<const NodeId> neighbors(NodeId u) const;
  std::size_t degree(NodeId u) const { return neighbors(u).size(); }

  // Dense access by position in nodes(); used by the hot loops.
  std::optional<std::size_t> position(NodeId u) const;
  std::span<const NodeId> neighbors_at(std::size_t pos) const { return adjacency_[pos]; }

  // Subgraph induced on `keep` (members absent from this graph are ignored).
  Graph induced(std::span<const NodeId> keep) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<NodeId> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
};

// One graph g(i) at index i and month T(i). Immutable once built.
class Snapshot {
 public:
  Snapshot() = default;
  Snapshot(int index, YearMonth timestamp, Graph graph)
      : index_(index), timestamp_(timestamp), graph_(std::move(graph)) {}

  int index() const { return index_; }
  YearMonth timestamp() const { return timestamp_; }
  const Graph& graph() const { return graph_; }

  std::span<const NodeId> nodes() const { return graph_.nodes(); }
  std::span<const Edge> edges() const { return graph_.edges(); }

  friend bool operator==(const Snapshot&, const Snapshot&) = default;

 private:
  int index_{0};
  YearMonth timestamp_;
  Graph graph_;
};

Snapshot build_snapshot(std::span<const NodePair> pairs, std::span<const NodeId> isolates, int index,
                        std::string_view timestamp);

// Ascending by NodeId; isolates map to 0.
std::map<NodeId, std::size_t> degree_sequence(const Snapshot& g);

std::span<const NodeId> neighbors(const Snapshot& g, NodeId u);

// Ordered series G = {g(1)...g(n)}. When `window_months` is set, consecutive
// timestamps must differ by exactly that many months.
class SnapshotSeries {
 public:
  SnapshotSeries() = default;
  explicit SnapshotSeries(std::vector<Snapshot> snapshots, std::optional<int> window_months = std::nullopt);

  std::span<const Snapshot> snapshots() const { return snapshots_; }
  std::size_t size() const { return snapshots_.size(); }
  const Snapshot& operator[](std::size_t i) const { return snapshots_[i]; }
  std::optional<int> window_months() const { return window_months_; }

 private:
  std::vector<Snapshot> snapshots_;
  std::optional<int> window_months_;
};

// Canonical snapshot file: "# ..." comments, "<lo> <hi>" lines sorted by
// (lo, hi), then "%iso <id>" lines for degree-zero nodes.
std::string format_canonical(const Snapshot& g);

}  // namespace netmeta
