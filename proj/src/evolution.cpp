#include "netmeta/evolution.hpp"

#include <algorithm>
#include <iterator>

#include <fmt/format.h>

#include "netmeta/error.hpp"

namespace netmeta {

std::string_view to_string(Side s) { return s == Side::Birth ? "birth" : "death"; }

std::string_view to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::Inner: return "inner";
    case EdgeClass::Boundary: return "boundary";
    case EdgeClass::Outer: return "outer";
  }
  return "?";
}

std::string_view to_string(EdgeState s) {
  switch (s) {
    case EdgeState::Steady: return "steady";
    case EdgeState::Born: return "born";
    case EdgeState::Dead: return "dead";
  }
  return "?";
}

const std::vector<Edge>& EvolutionDelta::edges(Side side, EdgeClass cls) const {
  if (side == Side::Birth) {
    switch (cls) {
      case EdgeClass::Inner: return born_inner;
      case EdgeClass::Boundary: return born_boundary;
      case EdgeClass::Outer: return born_outer;
    }
  }
  switch (cls) {
    case EdgeClass::Inner: return dead_inner;
    case EdgeClass::Boundary: return dead_boundary;
    case EdgeClass::Outer: return dead_outer;
  }
  return dead_outer;
}

namespace {

// Edges of `own` not in `other`, split by how many endpoints are missing from
// the other snapshot's node set.
void split_changed(const Graph& own, const Graph& other, std::vector<Edge>& outer,
                   std::vector<Edge>& boundary, std::vector<Edge>& inner) {
  for (const Edge& e : own.edges()) {
    bool lo_steady = other.contains(e.lo);
    bool hi_steady = other.contains(e.hi);
    if (lo_steady && hi_steady) {
      if (!other.has_edge(e)) inner.push_back(e);
    } else if (lo_steady || hi_steady) {
      boundary.push_back(e);
    } else {
      outer.push_back(e);
    }
  }
}

EvolutionDelta decompose(const Graph& from, const Graph& to) {
  EvolutionDelta d;
  auto a = from.nodes();
  auto b = to.nodes();
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(d.steady_nodes));
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(d.dead_nodes));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(d.born_nodes));
  split_changed(from, to, d.dead_outer, d.dead_boundary, d.dead_inner);
  split_changed(to, from, d.born_outer, d.born_boundary, d.born_inner);
  return d;
}

}  // namespace

EvolutionDelta classify_pair(const Snapshot& from, const Snapshot& to) {
  if (from.index() >= to.index()) {
    throw Error(ErrorCode::OrderViolation,
                fmt::format("pair ({}, {}) is not in time order", from.index(), to.index()));
  }
  EvolutionDelta d = decompose(from.graph(), to.graph());
  d.from_index = from.index();
  d.to_index = to.index();
  return d;
}

EgoDelta ego_delta(const Snapshot& from, const Snapshot& to, NodeId focal) {
  if (from.index() >= to.index()) {
    throw Error(ErrorCode::OrderViolation,
                fmt::format("pair ({}, {}) is not in time order", from.index(), to.index()));
  }
  const Graph& gf = from.graph();
  const Graph& gt = to.graph();
  if (!gf.contains(focal) && !gt.contains(focal)) {
    throw Error(ErrorCode::UnknownNode, fmt::format("node {} is in neither snapshot", focal.value));
  }
  std::vector<NodeId> hood{focal};
  if (gf.contains(focal)) {
    auto n = gf.neighbors(focal);
    hood.insert(hood.end(), n.begin(), n.end());
  }
  if (gt.contains(focal)) {
    auto n = gt.neighbors(focal);
    hood.insert(hood.end(), n.begin(), n.end());
  }
  Graph ego_from = gf.induced(hood);
  Graph ego_to = gt.induced(hood);

  EgoDelta out;
  out.delta = decompose(ego_from, ego_to);
  out.delta.from_index = from.index();
  out.delta.to_index = to.index();

  for (const Edge& e : ego_from.edges()) {
    out.edges.push_back({e, ego_to.has_edge(e) ? EdgeState::Steady : EdgeState::Dead});
  }
  for (const Edge& e : ego_to.edges()) {
    if (!ego_from.has_edge(e)) out.edges.push_back({e, EdgeState::Born});
  }
  std::sort(out.edges.begin(), out.edges.end(),
            [](const LabeledEdge& x, const LabeledEdge& y) { return x.edge < y.edge; });
  return out;
}

}  // namespace netmeta
