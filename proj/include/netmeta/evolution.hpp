#pragma once

// Birth/death decomposition of a snapshot pair into node classes and the six
// changed-edge classes (outer, boundary, inner on each side).

#include <string_view>
#include <vector>

#include "netmeta/graph.hpp"

namespace netmeta {

enum class Side { Birth, Death };
enum class EdgeClass { Inner, Boundary, Outer };

std::string_view to_string(Side s);
std::string_view to_string(EdgeClass c);

struct EvolutionDelta {
  int from_index{0};
  int to_index{0};

  std::vector<NodeId> steady_nodes;
  std::vector<NodeId> born_nodes;
  std::vector<NodeId> dead_nodes;

  std::vector<Edge> dead_outer;
  std::vector<Edge> dead_boundary;
  std::vector<Edge> dead_inner;
  std::vector<Edge> born_outer;
  std::vector<Edge> born_boundary;
  std::vector<Edge> born_inner;

  const std::vector<Edge>& edges(Side side, EdgeClass cls) const;
  std::size_t born_edge_count() const { return born_outer.size() + born_boundary.size() + born_inner.size(); }
  std::size_t dead_edge_count() const { return dead_outer.size() + dead_boundary.size() + dead_inner.size(); }

  friend bool operator==(const EvolutionDelta&, const EvolutionDelta&) = default;
};

// Throws OrderViolation unless from.index() < to.index(). Steady edges
// (present in both) are not stored.
EvolutionDelta classify_pair(const Snapshot& from, const Snapshot& to);

enum class EdgeState { Steady, Born, Dead };

std::string_view to_string(EdgeState s);

struct LabeledEdge {
  Edge edge;
  EdgeState state;

  friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

struct EgoDelta {
  EvolutionDelta delta;
  std::vector<LabeledEdge> edges;  // every edge of either induced ego graph, sorted
};

// classify_pair restricted to focal ∪ N_from(focal) ∪ N_to(focal). Throws
// UnknownNode if the focal node is in neither snapshot.
EgoDelta ego_delta(const Snapshot& from, const Snapshot& to, NodeId focal);

}  // namespace netmeta
