#pragma once

// M1 (edge), M2 (induced open 3-path) and M3 (triangle) counts.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "netmeta/evolution.hpp"
#include "netmeta/graph.hpp"

namespace netmeta {

struct MotifCounts {
  std::uint64_t m1{0};
  std::uint64_t m2{0};
  std::uint64_t m3{0};

  friend bool operator==(const MotifCounts&, const MotifCounts&) = default;
};

// Wedge enumeration over sorted adjacency; m2 = wedges - 3*m3. `threads`
// splits the node range (0 = one worker); the result does not depend on it.
MotifCounts static_census(const Graph& g, unsigned threads = 0);
MotifCounts static_census(const Snapshot& g, unsigned threads = 0);

// Exhaustive triple enumeration, kept as a test oracle. Throws CapExceeded
// when the graph has more than `cap` nodes.
MotifCounts brute_census(const Graph& g, std::size_t cap = 500);
MotifCounts brute_census(const Snapshot& g, std::size_t cap = 500);

// Σ_u C(deg u, 2).
std::uint64_t wedge_count(const Graph& g);

struct CensusTable {
  int from_index{0};
  int to_index{0};
  // [side][class], side 0 = birth, 1 = death; class 0 = inner, 1 = boundary, 2 = outer.
  std::array<std::array<MotifCounts, 3>, 2> cells{};

  const MotifCounts& at(Side side, EdgeClass cls) const;
  MotifCounts& at(Side side, EdgeClass cls);
  std::uint64_t m3_total(Side side) const;

  friend bool operator==(const CensusTable&, const CensusTable&) = default;
};

// Census of each class subgraph: exactly that class's edges and their endpoints.
CensusTable delta_census(const EvolutionDelta& delta);

struct M3Rate {
  int from_index{0};
  int to_index{0};
  std::optional<double> birth_rate;  // nullopt = NotDefined (no triangles in g(i+1))
  std::optional<double> death_rate;  // nullopt = NotDefined (no triangles in g(i))

  friend bool operator==(const M3Rate&, const M3Rate&) = default;
};

// death = Σ death m3 / m3(g(i)); birth = Σ birth m3 / m3(g(i+1)).
// `static_m3` holds the per-snapshot triangle counts, aligned with the series.
std::vector<M3Rate> m3_rates(std::span<const CensusTable> tables, std::span<const std::uint64_t> static_m3);
std::vector<M3Rate> m3_rates(const SnapshotSeries& series, std::span<const CensusTable> tables);

// Up to `cap` induced motif instances, for ego-scale reporting.
struct MotifInstance {
  enum class Kind { M2, M3 } kind;
  std::array<NodeId, 3> nodes;  // M2: center first, then the two leaves ascending
};
std::vector<MotifInstance> motif_instances(const Graph& g, std::size_t cap = 10000);

}  // namespace netmeta
