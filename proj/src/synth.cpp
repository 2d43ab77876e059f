#include "netmeta/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "netmeta/error.hpp"

namespace netmeta {

std::uint64_t SynthRng::uniform_below(std::uint64_t n) {
  // Reject the low 2^64 mod n values so every residue is equally likely.
  const std::uint64_t floor = (0 - n) % n;
  std::uint64_t r = next();
  while (r < floor) r = next();
  return r % n;
}

double SynthRng::unit() { return double(next() >> 11) * 0x1.0p-53; }

void SynthConfig::validate() const {
  auto rate_ok = [](double r) { return r >= 0.0 && r < 1.0; };
  if (!rate_ok(node_birth_rate) || !rate_ok(node_death_rate)) {
    throw Error(ErrorCode::InvalidConfig, "node birth/death rates must lie in [0, 1)");
  }
  if (n0 < 3) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("n0 must be at least 3, got {}", n0));
  }
}

namespace {

std::string_view attachment_name(Attachment a) { return a == Attachment::Uniform ? "uniform" : "preferential"; }
std::string_view motif_mode_name(MotifMode m) { return m == MotifMode::Wedge ? "wedge" : "all_edges"; }

nlohmann::json edges_json(const std::vector<Edge>& edges) {
  auto arr = nlohmann::json::array();
  for (const auto& e : edges) arr.push_back({e.lo.value, e.hi.value});
  return arr;
}

nlohmann::json nodes_json(const std::vector<NodeId>& nodes) {
  auto arr = nlohmann::json::array();
  for (auto n : nodes) arr.push_back(n.value);
  return arr;
}

nlohmann::json triples_json(const std::vector<std::array<NodeId, 3>>& triples) {
  auto arr = nlohmann::json::array();
  for (const auto& t : triples) arr.push_back({t[0].value, t[1].value, t[2].value});
  return arr;
}

}  // namespace

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
  SynthConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.n0 = j.value("n0", c.n0);
    c.steps = j.value("steps", c.steps);
    c.node_birth_rate = j.value("node_birth_rate", c.node_birth_rate);
    c.node_death_rate = j.value("node_death_rate", c.node_death_rate);
    c.inner_rewire_per_step = j.value("inner_rewire_per_step", c.inner_rewire_per_step);
    c.triangle_close_per_step = j.value("triangle_close_per_step", c.triangle_close_per_step);
    c.triangle_break_per_step = j.value("triangle_break_per_step", c.triangle_break_per_step);
    std::string attachment = j.value("attachment", std::string(attachment_name(c.attachment)));
    if (attachment == "uniform") {
      c.attachment = Attachment::Uniform;
    } else if (attachment == "preferential") {
      c.attachment = Attachment::Preferential;
    } else {
      throw Error(ErrorCode::InvalidConfig, fmt::format("unknown attachment '{}'", attachment));
    }
    std::string mode = j.value("motif_mode", std::string(motif_mode_name(c.motif_mode)));
    if (mode == "wedge") {
      c.motif_mode = MotifMode::Wedge;
    } else if (mode == "all_edges") {
      c.motif_mode = MotifMode::AllEdges;
    } else {
      throw Error(ErrorCode::InvalidConfig, fmt::format("unknown motif_mode '{}'", mode));
    }
    if (j.contains("start")) c.start = YearMonth::parse(j.at("start").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

nlohmann::ordered_json SynthConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["n0"] = n0;
  j["steps"] = steps;
  j["node_birth_rate"] = node_birth_rate;
  j["node_death_rate"] = node_death_rate;
  j["inner_rewire_per_step"] = inner_rewire_per_step;
  j["triangle_close_per_step"] = triangle_close_per_step;
  j["triangle_break_per_step"] = triangle_break_per_step;
  j["attachment"] = attachment_name(attachment);
  j["motif_mode"] = motif_mode_name(motif_mode);
  j["start"] = start.str();
  return j;
}

nlohmann::ordered_json SynthTruth::to_json() const {
  nlohmann::ordered_json j;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : steps) {
    nlohmann::ordered_json o;
    o["from"] = s.from_index;
    o["to"] = s.to_index;
    o["born_nodes"] = nodes_json(s.born_nodes);
    o["dead_nodes"] = nodes_json(s.dead_nodes);
    o["born_inner"] = edges_json(s.born_inner);
    o["born_boundary"] = edges_json(s.born_boundary);
    o["born_outer"] = edges_json(s.born_outer);
    o["dead_inner"] = edges_json(s.dead_inner);
    o["dead_boundary"] = edges_json(s.dead_boundary);
    o["dead_outer"] = edges_json(s.dead_outer);
    o["closures"] = triples_json(s.closures);
    o["breaks"] = triples_json(s.breaks);
    o["rewire_shortfall"] = s.rewire_shortfall;
    o["closure_shortfall"] = s.closure_shortfall;
    o["break_shortfall"] = s.break_shortfall;
    arr.push_back(std::move(o));
  }
  j["steps"] = std::move(arr);
  return j;
}

namespace {

using Adjacency = std::map<NodeId, std::set<NodeId>>;

class Builder {
 public:
  explicit Builder(const SynthConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  SynthResult run() {
    SynthResult result;
    std::vector<Snapshot> snapshots;
    seed_graph();
    YearMonth ts = cfg_.start;
    snapshots.push_back(snapshot(1, ts));
    for (std::size_t s = 0; s < cfg_.steps; ++s) {
      StepTruth truth;
      truth.from_index = int(s) + 1;
      truth.to_index = int(s) + 2;
      step(truth);
      ts = ts.next();
      snapshots.push_back(snapshot(truth.to_index, ts));
      result.truth.steps.push_back(std::move(truth));
    }
    result.series = SnapshotSeries(std::move(snapshots), 1);
    return result;
  }

 private:
  static std::size_t planted(double rate, std::size_t n) {
    // The epsilon keeps e.g. 0.29 * 100 from flooring to 28.
    return static_cast<std::size_t>(std::floor(rate * double(n) + 1e-9));
  }

  bool adjacent(NodeId a, NodeId b) const {
    auto it = adj_.find(a);
    return it != adj_.end() && it->second.count(b) > 0;
  }

  void add_edge(NodeId a, NodeId b) {
    adj_[a].insert(b);
    adj_[b].insert(a);
  }

  void remove_edge(NodeId a, NodeId b) {
    adj_[a].erase(b);
    adj_[b].erase(a);
  }

  NodeId fresh_node() {
    NodeId id{next_id_++};
    adj_[id];
    return id;
  }

  // Draws from `pool` uniformly or with weight degree + 1.
  NodeId pick(const std::vector<NodeId>& pool) {
    if (cfg_.attachment == Attachment::Uniform) return pool[rng_.uniform_below(pool.size())];
    std::uint64_t total = 0;
    for (NodeId u : pool) total += adj_[u].size() + 1;
    std::uint64_t r = rng_.uniform_below(total);
    for (NodeId u : pool) {
      std::uint64_t w = adj_[u].size() + 1;
      if (r < w) return u;
      r -= w;
    }
    return pool.back();
  }

  void seed_graph() {
    std::vector<NodeId> nodes;
    for (std::size_t k = 0; k < cfg_.n0; ++k) {
      NodeId u = fresh_node();
      if (!nodes.empty()) add_edge(u, pick(nodes));
      nodes.push_back(u);
    }
    // Extra chords so the seed graph has wedges and triangles to work with.
    for (std::size_t extra = 0; extra < cfg_.n0 / 2; ++extra) {
      for (int attempt = 0; attempt < 32; ++attempt) {
        NodeId a = nodes[rng_.uniform_below(nodes.size())];
        NodeId b = pick(nodes);
        if (a != b && !adjacent(a, b)) {
          add_edge(a, b);
          break;
        }
      }
    }
  }

  Snapshot snapshot(int index, YearMonth ts) const {
    std::vector<Edge> edges;
    std::vector<NodeId> nodes;
    for (const auto& [u, nb] : adj_) {
      nodes.push_back(u);
      for (NodeId v : nb) {
        if (u < v) edges.push_back(Edge{u, v});
      }
    }
    return Snapshot(index, ts, Graph::from_edges(std::move(edges), nodes));
  }

  void step(StepTruth& truth) {
    const Adjacency before = adj_;
    auto existed = [&](NodeId a, NodeId b) {
      auto it = before.find(a);
      return it != before.end() && it->second.count(b) > 0;
    };
    const std::size_t n = before.size();

    // Deaths: lowest degree first, ties by ascending id.
    std::vector<std::pair<std::size_t, NodeId>> order;
    for (const auto& [u, nb] : before) order.emplace_back(nb.size(), u);
    std::sort(order.begin(), order.end());
    std::size_t deaths = planted(cfg_.node_death_rate, n);
    std::set<NodeId> dead;
    for (std::size_t k = 0; k < deaths; ++k) dead.insert(order[k].second);
    for (NodeId u : dead) {
      truth.dead_nodes.push_back(u);
      for (NodeId v : before.at(u)) {
        if (u < v || !dead.count(v)) {
          Edge e = Edge::make(u, v);
          (dead.count(v) ? truth.dead_outer : truth.dead_boundary).push_back(e);
        }
      }
    }
    for (NodeId u : dead) {
      for (NodeId v : std::set<NodeId>(adj_[u])) remove_edge(u, v);
      adj_.erase(u);
    }

    std::vector<NodeId> steady;
    for (const auto& [u, nb] : adj_) steady.push_back(u);

    // Births: one to three links; the first always to a steady node.
    std::size_t births = planted(cfg_.node_birth_rate, n);
    std::vector<NodeId> born;
    for (std::size_t k = 0; k < births; ++k) {
      NodeId u = fresh_node();
      std::size_t links = 1 + rng_.uniform_below(3);
      for (std::size_t l = 0; l < links; ++l) {
        for (int attempt = 0; attempt < 8; ++attempt) {
          bool to_born = l > 0 && !born.empty() && rng_.uniform_below(4) == 0;
          NodeId v = to_born ? born[rng_.uniform_below(born.size())] : pick(steady);
          if (adjacent(u, v)) continue;
          add_edge(u, v);
          (to_born ? truth.born_outer : truth.born_boundary).push_back(Edge::make(u, v));
          break;
        }
      }
      born.push_back(u);
    }
    truth.born_nodes = born;

    std::set<Edge> removed;
    // A steady pair can gain an edge only if it had none before the step.
    auto addable = [&](NodeId a, NodeId b) { return a != b && !adjacent(a, b) && !existed(a, b); };
    auto removable = [&](NodeId a, NodeId b) { return adjacent(a, b) && existed(a, b); };

    for (std::size_t r = 0; r < cfg_.inner_rewire_per_step; ++r) {
      std::vector<Edge> old_edges;
      for (NodeId u : steady) {
        for (NodeId v : adj_[u]) {
          if (u < v && !dead.count(v) && removable(u, v) && std::binary_search(steady.begin(), steady.end(), v)) {
            old_edges.push_back(Edge{u, v});
          }
        }
      }
      auto fresh = random_addable_pair(steady, addable);
      if (old_edges.empty() || !fresh) {
        ++truth.rewire_shortfall;
        continue;
      }
      Edge gone = old_edges[rng_.uniform_below(old_edges.size())];
      remove_edge(gone.lo, gone.hi);
      truth.dead_inner.push_back(gone);
      add_edge(fresh->lo, fresh->hi);
      truth.born_inner.push_back(*fresh);
    }

    if (cfg_.motif_mode == MotifMode::Wedge) {
      plant_wedge_closures(truth, steady, addable);
      plant_wedge_breaks(truth, steady, removable);
    } else {
      plant_triple_closures(truth, steady, addable);
      plant_triangle_breaks(truth, steady, removable);
    }

    for (auto* list : {&truth.born_inner, &truth.born_boundary, &truth.born_outer, &truth.dead_inner,
                       &truth.dead_boundary, &truth.dead_outer}) {
      std::sort(list->begin(), list->end());
    }
  }

  template <typename Pred>
  std::optional<Edge> random_addable_pair(const std::vector<NodeId>& steady, Pred addable) {
    if (steady.size() < 2) return std::nullopt;
    for (int attempt = 0; attempt < 64; ++attempt) {
      NodeId a = steady[rng_.uniform_below(steady.size())];
      NodeId b = steady[rng_.uniform_below(steady.size())];
      if (addable(a, b)) return Edge::make(a, b);
    }
    std::vector<Edge> all;
    for (std::size_t i = 0; i < steady.size(); ++i) {
      for (std::size_t j = i + 1; j < steady.size(); ++j) {
        if (addable(steady[i], steady[j])) all.push_back(Edge{steady[i], steady[j]});
      }
    }
    if (all.empty()) return std::nullopt;
    return all[rng_.uniform_below(all.size())];
  }

  // Triangles among steady nodes whose three edges all predate the step.
  template <typename Pred>
  std::vector<std::array<NodeId, 3>> old_triangles(const std::vector<NodeId>& steady, Pred removable) {
    std::vector<std::array<NodeId, 3>> tris;
    auto is_steady = [&](NodeId x) { return std::binary_search(steady.begin(), steady.end(), x); };
    for (NodeId u : steady) {
      const auto& nu = adj_[u];
      for (auto vi = nu.upper_bound(u); vi != nu.end(); ++vi) {
        NodeId v = *vi;
        if (!is_steady(v) || !removable(u, v)) continue;
        for (auto wi = nu.upper_bound(v); wi != nu.end(); ++wi) {
          NodeId w = *wi;
          if (is_steady(w) && removable(u, w) && removable(v, w)) tris.push_back({u, v, w});
        }
      }
    }
    return tris;
  }

  template <typename Pred>
  void plant_wedge_closures(StepTruth& truth, const std::vector<NodeId>& steady, Pred addable) {
    auto is_steady = [&](NodeId x) { return std::binary_search(steady.begin(), steady.end(), x); };
    for (std::size_t k = 0; k < cfg_.triangle_close_per_step; ++k) {
      std::vector<std::array<NodeId, 3>> wedges;  // leaf, center, leaf
      for (NodeId v : steady) {
        std::vector<NodeId> nb;
        for (NodeId x : adj_[v]) {
          if (is_steady(x)) nb.push_back(x);
        }
        for (std::size_t i = 0; i < nb.size(); ++i) {
          for (std::size_t j = i + 1; j < nb.size(); ++j) {
            if (addable(nb[i], nb[j])) wedges.push_back({nb[i], v, nb[j]});
          }
        }
      }
      if (wedges.empty()) {
        truth.closure_shortfall += cfg_.triangle_close_per_step - k;
        return;
      }
      auto w = wedges[rng_.uniform_below(wedges.size())];
      add_edge(w[0], w[2]);
      truth.born_inner.push_back(Edge::make(w[0], w[2]));
      std::array<NodeId, 3> tri{w[0], w[1], w[2]};
      std::sort(tri.begin(), tri.end());
      truth.closures.push_back(tri);
    }
  }

  template <typename Pred>
  void plant_wedge_breaks(StepTruth& truth, const std::vector<NodeId>& steady, Pred removable) {
    for (std::size_t k = 0; k < cfg_.triangle_break_per_step; ++k) {
      auto tris = old_triangles(steady, removable);
      if (tris.empty()) {
        truth.break_shortfall += cfg_.triangle_break_per_step - k;
        return;
      }
      auto t = tris[rng_.uniform_below(tris.size())];
      std::size_t skip = rng_.uniform_below(3);
      Edge gone = Edge::make(t[skip], t[(skip + 1) % 3]);
      remove_edge(gone.lo, gone.hi);
      truth.dead_inner.push_back(gone);
      truth.breaks.push_back(t);
    }
  }

  template <typename Pred>
  void plant_triple_closures(StepTruth& truth, const std::vector<NodeId>& steady, Pred addable) {
    std::set<NodeId> used;
    for (std::size_t k = 0; k < cfg_.triangle_close_per_step; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < 256 && steady.size() >= 3; ++attempt) {
        std::array<NodeId, 3> t{steady[rng_.uniform_below(steady.size())], steady[rng_.uniform_below(steady.size())],
                                steady[rng_.uniform_below(steady.size())]};
        std::sort(t.begin(), t.end());
        if (t[0] == t[1] || t[1] == t[2]) continue;
        if (used.count(t[0]) || used.count(t[1]) || used.count(t[2])) continue;
        if (!addable(t[0], t[1]) || !addable(t[0], t[2]) || !addable(t[1], t[2])) continue;
        for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
          add_edge(t[i], t[j]);
          truth.born_inner.push_back(Edge{t[i], t[j]});
        }
        used.insert(t.begin(), t.end());
        truth.closures.push_back(t);
        placed = true;
        break;
      }
      if (!placed) ++truth.closure_shortfall;
    }
  }

  template <typename Pred>
  void plant_triangle_breaks(StepTruth& truth, const std::vector<NodeId>& steady, Pred removable) {
    std::set<NodeId> used;
    for (std::size_t k = 0; k < cfg_.triangle_break_per_step; ++k) {
      auto tris = old_triangles(steady, removable);
      std::erase_if(tris, [&](const auto& t) { return used.count(t[0]) || used.count(t[1]) || used.count(t[2]); });
      if (tris.empty()) {
        truth.break_shortfall += cfg_.triangle_break_per_step - k;
        return;
      }
      auto t = tris[rng_.uniform_below(tris.size())];
      for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
        remove_edge(t[i], t[j]);
        truth.dead_inner.push_back(Edge{t[i], t[j]});
      }
      used.insert(t.begin(), t.end());
      truth.breaks.push_back(t);
    }
  }

  const SynthConfig& cfg_;
  SynthRng rng_;
  Adjacency adj_;
  std::uint64_t next_id_{1};
};

}  // namespace

SynthResult generate(const SynthConfig& config) {
  config.validate();
  return Builder(config).run();
}

}  // namespace netmeta
