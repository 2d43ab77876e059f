#include "netmeta/census.hpp"

#include <algorithm>
#include <thread>

#include <fmt/format.h>

#include "netmeta/error.hpp"

namespace netmeta {

namespace {

struct Partial {
  std::uint64_t wedges{0};
  std::uint64_t triangles{0};
};

// Triangles are counted once, at their smallest node u, as u < v < w.
Partial census_range(const Graph& g, std::size_t begin, std::size_t end) {
  Partial p;
  auto nodes = g.nodes();
  for (std::size_t i = begin; i < end; ++i) {
    NodeId u = nodes[i];
    auto nu = g.neighbors_at(i);
    std::uint64_t d = nu.size();
    if (d >= 2) p.wedges += d * (d - 1) / 2;
    auto above_u = std::upper_bound(nu.begin(), nu.end(), u);
    for (auto it = above_u; it != nu.end(); ++it) {
      NodeId v = *it;
      auto nv = g.neighbors_at(*g.position(v));
      // |{w in N(u) ∩ N(v) : w > v}|
      auto a = std::upper_bound(nu.begin(), nu.end(), v);
      auto b = std::upper_bound(nv.begin(), nv.end(), v);
      while (a != nu.end() && b != nv.end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++p.triangles;
          ++a;
          ++b;
        }
      }
    }
  }
  return p;
}

}  // namespace

MotifCounts static_census(const Graph& g, unsigned threads) {
  std::size_t n = g.node_count();
  unsigned workers = std::max(1u, threads);
  if (n < 2048) workers = 1;

  std::vector<Partial> parts(workers);
  if (workers == 1) {
    parts[0] = census_range(g, 0, n);
  } else {
    // Strided chunks balance hubs across workers.
    std::vector<std::thread> pool;
    constexpr std::size_t kChunk = 256;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t start = w * kChunk; start < n; start += workers * kChunk) {
          Partial p = census_range(g, start, std::min(n, start + kChunk));
          parts[w].wedges += p.wedges;
          parts[w].triangles += p.triangles;
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  Partial total;
  for (const auto& p : parts) {
    total.wedges += p.wedges;
    total.triangles += p.triangles;
  }
  return {g.edge_count(), total.wedges - 3 * total.triangles, total.triangles};
}

MotifCounts static_census(const Snapshot& g, unsigned threads) { return static_census(g.graph(), threads); }

MotifCounts brute_census(const Graph& g, std::size_t cap) {
  std::size_t n = g.node_count();
  if (n > cap) {
    throw Error(ErrorCode::CapExceeded, fmt::format("{} nodes exceeds brute-force cap {}", n, cap));
  }
  MotifCounts c;
  auto nodes = g.nodes();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool ij = g.has_edge(nodes[i], nodes[j]);
      if (ij) ++c.m1;
      for (std::size_t k = j + 1; k < n; ++k) {
        int present = int(ij) + int(g.has_edge(nodes[i], nodes[k])) + int(g.has_edge(nodes[j], nodes[k]));
        if (present == 3) ++c.m3;
        if (present == 2) ++c.m2;
      }
    }
  }
  return c;
}

MotifCounts brute_census(const Snapshot& g, std::size_t cap) { return brute_census(g.graph(), cap); }

std::uint64_t wedge_count(const Graph& g) {
  std::uint64_t w = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    std::uint64_t d = g.neighbors_at(i).size();
    if (d >= 2) w += d * (d - 1) / 2;
  }
  return w;
}

const MotifCounts& CensusTable::at(Side side, EdgeClass cls) const {
  return cells[side == Side::Birth ? 0 : 1][static_cast<std::size_t>(cls)];
}

MotifCounts& CensusTable::at(Side side, EdgeClass cls) {
  return cells[side == Side::Birth ? 0 : 1][static_cast<std::size_t>(cls)];
}

std::uint64_t CensusTable::m3_total(Side side) const {
  std::uint64_t t = 0;
  for (const auto& c : cells[side == Side::Birth ? 0 : 1]) t += c.m3;
  return t;
}

CensusTable delta_census(const EvolutionDelta& delta) {
  CensusTable table;
  table.from_index = delta.from_index;
  table.to_index = delta.to_index;
  for (Side side : {Side::Birth, Side::Death}) {
    for (EdgeClass cls : {EdgeClass::Inner, EdgeClass::Boundary, EdgeClass::Outer}) {
      table.at(side, cls) = static_census(Graph::from_edges(delta.edges(side, cls)));
    }
  }
  return table;
}

std::vector<M3Rate> m3_rates(std::span<const CensusTable> tables, std::span<const std::uint64_t> static_m3) {
  if (static_m3.size() != tables.size() + 1) {
    throw Error(ErrorCode::InvalidSeries,
                fmt::format("{} census tables need {} snapshot counts, got {}", tables.size(),
                            tables.size() + 1, static_m3.size()));
  }
  std::vector<M3Rate> rates;
  rates.reserve(tables.size());
  for (std::size_t i = 0; i < tables.size(); ++i) {
    M3Rate r{tables[i].from_index, tables[i].to_index, std::nullopt, std::nullopt};
    if (static_m3[i + 1] > 0) r.birth_rate = double(tables[i].m3_total(Side::Birth)) / double(static_m3[i + 1]);
    if (static_m3[i] > 0) r.death_rate = double(tables[i].m3_total(Side::Death)) / double(static_m3[i]);
    rates.push_back(r);
  }
  return rates;
}

std::vector<M3Rate> m3_rates(const SnapshotSeries& series, std::span<const CensusTable> tables) {
  std::vector<std::uint64_t> counts;
  counts.reserve(series.size());
  for (const auto& g : series.snapshots()) counts.push_back(static_census(g).m3);
  return m3_rates(tables, counts);
}

std::vector<MotifInstance> motif_instances(const Graph& g, std::size_t cap) {
  std::vector<MotifInstance> out;
  auto nodes = g.nodes();
  for (std::size_t i = 0; i < nodes.size() && out.size() < cap; ++i) {
    NodeId center = nodes[i];
    auto nb = g.neighbors_at(i);
    for (std::size_t a = 0; a < nb.size() && out.size() < cap; ++a) {
      for (std::size_t b = a + 1; b < nb.size() && out.size() < cap; ++b) {
        if (!g.has_edge(nb[a], nb[b])) {
          out.push_back({MotifInstance::Kind::M2, {center, nb[a], nb[b]}});
        } else if (center < nb[a]) {
          out.push_back({MotifInstance::Kind::M3, {center, nb[a], nb[b]}});
        }
      }
    }
  }
  return out;
}

}  // namespace netmeta
