#include "netmeta/graph.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "netmeta/error.hpp"

namespace netmeta {

Edge Edge::make(NodeId a, NodeId b) {
  if (a == b) {
    throw Error(ErrorCode::SelfLoop, fmt::format("self-loop on node {}", a.value));
  }
  return a < b ? Edge{a, b} : Edge{b, a};
}

YearMonth YearMonth::parse(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.size() != 6 || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidTimestamp, fmt::format("'{}' is not YYYYMM", text));
  }
  YearMonth ym{value / 100, value % 100};
  if (!valid(ym.year, ym.month)) {
    throw Error(ErrorCode::InvalidTimestamp, fmt::format("'{}' is not a calendar month", text));
  }
  return ym;
}

std::string YearMonth::str() const { return fmt::format("{:04d}{:02d}", year, month); }

Graph Graph::from_pairs(std::span<const NodePair> pairs, std::span<const NodeId> isolates) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    edges.push_back(Edge::make(a, b));
  }
  return from_edges(std::move(edges), isolates);
}

Graph Graph::from_edges(std::vector<Edge> edges, std::span<const NodeId> isolates) {
  Graph g;
  for (auto& e : edges) {
    e = Edge::make(e.lo, e.hi);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  g.nodes_.reserve(edges.size() * 2 + isolates.size());
  for (const auto& e : edges) {
    g.nodes_.push_back(e.lo);
    g.nodes_.push_back(e.hi);
  }
  g.nodes_.insert(g.nodes_.end(), isolates.begin(), isolates.end());
  std::sort(g.nodes_.begin(), g.nodes_.end());
  g.nodes_.erase(std::unique(g.nodes_.begin(), g.nodes_.end()), g.nodes_.end());

  g.adjacency_.resize(g.nodes_.size());
  for (const auto& e : edges) {
    g.adjacency_[*g.position(e.lo)].push_back(e.hi);
    g.adjacency_[*g.position(e.hi)].push_back(e.lo);
  }
  for (auto& list : g.adjacency_) {
    std::sort(list.begin(), list.end());
  }
  g.edges_ = std::move(edges);
  return g;
}

std::optional<std::size_t> Graph::position(NodeId u) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), u);
  if (it == nodes_.end() || *it != u) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - nodes_.begin());
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a == b) {
    return false;
  }
  Edge e = a < b ? Edge{a, b} : Edge{b, a};
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

std::span<const NodeId> Graph::neighbors(NodeId u) const {
  auto pos = position(u);
  if (!pos) {
    throw Error(ErrorCode::UnknownNode, fmt::format("node {} is not in the graph", u.value));
  }
  return adjacency_[*pos];
}

Graph Graph::induced(std::span<const NodeId> keep) const {
  std::vector<NodeId> members;
  for (NodeId u : keep) {
    if (contains(u)) {
      members.push_back(u);
    }
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  std::vector<Edge> edges;
  for (NodeId u : members) {
    for (NodeId v : neighbors(u)) {
      if (u < v && std::binary_search(members.begin(), members.end(), v)) {
        edges.push_back(Edge{u, v});
      }
    }
  }
  return from_edges(std::move(edges), members);
}

Snapshot build_snapshot(std::span<const NodePair> pairs, std::span<const NodeId> isolates, int index,
                        std::string_view timestamp) {
  YearMonth ts = YearMonth::parse(timestamp);
  return Snapshot(index, ts, Graph::from_pairs(pairs, isolates));
}

std::map<NodeId, std::size_t> degree_sequence(const Snapshot& g) {
  std::map<NodeId, std::size_t> degrees;
  const Graph& graph = g.graph();
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    degrees.emplace_hint(degrees.end(), graph.nodes()[i], graph.neighbors_at(i).size());
  }
  return degrees;
}

std::span<const NodeId> neighbors(const Snapshot& g, NodeId u) { return g.graph().neighbors(u); }

SnapshotSeries::SnapshotSeries(std::vector<Snapshot> snapshots, std::optional<int> window_months)
    : snapshots_(std::move(snapshots)), window_months_(window_months) {
  if (window_months_ && *window_months_ <= 0) {
    throw Error(ErrorCode::InvalidSeries, fmt::format("window must be positive, got {}", *window_months_));
  }
  for (std::size_t i = 1; i < snapshots_.size(); ++i) {
    const Snapshot& prev = snapshots_[i - 1];
    const Snapshot& cur = snapshots_[i];
    if (cur.index() <= prev.index()) {
      throw Error(ErrorCode::InvalidSeries,
                  fmt::format("index {} does not follow index {}", cur.index(), prev.index()));
    }
    if (cur.timestamp() <= prev.timestamp()) {
      throw Error(ErrorCode::InvalidSeries, fmt::format("timestamp {} does not follow {}",
                                                        cur.timestamp().str(), prev.timestamp().str()));
    }
    if (window_months_ && cur.timestamp().ordinal() - prev.timestamp().ordinal() != *window_months_) {
      throw Error(ErrorCode::InvalidSeries,
                  fmt::format("{} -> {} is not a {}-month window", prev.timestamp().str(),
                              cur.timestamp().str(), *window_months_));
    }
  }
}

std::string format_canonical(const Snapshot& g) {
  std::string out = fmt::format("# netmeta snapshot {}\n", g.timestamp().str());
  for (const auto& e : g.edges()) {
    out += fmt::format("{} {}\n", e.lo.value, e.hi.value);
  }
  const Graph& graph = g.graph();
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    if (graph.neighbors_at(i).empty()) {
      out += fmt::format("%iso {}\n", graph.nodes()[i].value);
    }
  }
  return out;
}

}  // namespace netmeta
