#include <doctest.h>

#include <cmath>
#include <random>

#include "netmeta/error.hpp"
#include "netmeta/evolution.hpp"
#include "netmeta/metrics.hpp"
#include "test_support.hpp"

using namespace netmeta;
using namespace netmeta::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& err) {
    return err.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

// |E| = 100 on a steady node set, then 12 inner births and 2 inner deaths.
SnapshotSeries hundred_edge_pair() {
  std::vector<Edge> ei;
  for (std::uint64_t a = 0; a < 100; ++a) ei.push_back(Edge{NodeId{a}, NodeId{a + 1000}});
  std::vector<Edge> ej(ei.begin() + 2, ei.end());
  for (std::uint64_t a = 0; a < 12; ++a) ej.push_back(Edge{NodeId{a + 2}, NodeId{a + 1003}});
  std::vector<NodeId> all;
  for (const auto& x : ei) {
    all.push_back(x.lo);
    all.push_back(x.hi);
  }
  return SnapshotSeries({snap_from(ei, all, 1, {2000, 1}), snap_from(ej, all, 2, {2000, 2})}, 1);
}

std::vector<EvolutionDelta> deltas_of(const SnapshotSeries& s) {
  std::vector<EvolutionDelta> out;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) out.push_back(classify_pair(s[i], s[i + 1]));
  return out;
}

std::vector<TrendPoint> planted(double a, double b, double c, int n) {
  std::vector<TrendPoint> pts;
  for (int x = 1; x <= n; ++x) pts.push_back({double(x), a * std::exp(b * x) + c});
  return pts;
}

// Random k-regular graph by the configuration model with restarts.
Graph regular_graph(std::mt19937_64& rng, std::size_t nodes, std::size_t k) {
  for (;;) {
    std::vector<std::uint64_t> stubs;
    for (std::uint64_t v = 0; v < nodes; ++v)
      for (std::size_t i = 0; i < k; ++i) stubs.push_back(v);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<Edge> edges;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < stubs.size() && ok; i += 2) {
      if (stubs[i] == stubs[i + 1]) ok = false;
      else ok = edges.insert(e(stubs[i], stubs[i + 1])).second;
    }
    if (ok) return Graph::from_edges({edges.begin(), edges.end()});
  }
}

}  // namespace

TEST_CASE("metabolism rate on a hand-computed pair") {
  auto s = hundred_edge_pair();
  auto d = deltas_of(s);
  REQUIRE(d[0].born_inner.size() == 12);
  REQUIRE(d[0].dead_inner.size() == 2);
  CHECK(metabolism_rate(s, d) == 0.10);
  CHECK(metabolism_rate(s, d, Scope::Inner) == 0.10);
  CHECK(metabolism_rate(s, d, Scope::Outer) == 0.0);
}

TEST_CASE("metabolism rate of an unchanging series is zero") {
  auto g = snap({{1, 2}, {2, 3}, {3, 1}});
  SnapshotSeries s({Snapshot(1, {2000, 1}, g.graph()), Snapshot(2, {2000, 2}, g.graph()),
                    Snapshot(3, {2000, 3}, g.graph())},
                   1);
  CHECK(metabolism_rate(s, deltas_of(s)) == 0.0);
}

TEST_CASE("metabolism term by scope") {
  auto gi = snap({{1, 2}, {2, 3}, {3, 4}, {1, 5}, {5, 6}, {4, 6}}, {}, 1, "199801");
  auto gj = snap({{1, 2}, {1, 3}, {3, 4}, {2, 7}, {7, 8}}, {}, 2, "199802");
  auto d = classify_pair(gi, gj);
  CHECK(metabolism_term(d, 6) == doctest::Approx(1.0 / 6.0));
  CHECK(metabolism_term(d, 6, Scope::Inner) == 0.0);
  CHECK(metabolism_term(d, 6, Scope::Boundary) == doctest::Approx(1.0 / 6.0));
  CHECK(metabolism_term(d, 6, Scope::Outer) == 0.0);
  CHECK(code_of([&] { metabolism_term(d, 0); }) == ErrorCode::EmptySnapshot);
  CHECK(parse_scope("boundary") == Scope::Boundary);
  CHECK(code_of([] { parse_scope("everything"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("property: metabolism rate is invariant under relabeling") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto [gi, gj] = random_pair(rng, 60);
    if (gi.edges().empty()) continue;
    SnapshotSeries s({gi, gj});
    double r = metabolism_rate(s, deltas_of(s));
    auto shift = [](const Snapshot& g) {
      std::vector<Edge> edges;
      for (const auto& x : g.edges()) edges.push_back(Edge::make(NodeId{5000 - x.lo.value}, NodeId{5000 - x.hi.value}));
      std::vector<NodeId> nodes;
      for (auto v : g.nodes()) nodes.push_back(NodeId{5000 - v.value});
      return Snapshot(g.index(), g.timestamp(), Graph::from_edges(edges, nodes));
    };
    SnapshotSeries t({shift(gi), shift(gj)});
    CHECK(metabolism_rate(t, deltas_of(t)) == r);
  }
}

TEST_CASE("exp_trend_fit recovers planted parameters") {
  struct Case {
    double a, b, c;
    int n;
  };
  for (auto [a, b, c, n] : {Case{2, 0.2, 1, 20}, Case{712.34, 1 / 79.97, 253.41, 184}, Case{-3, -0.5, 10, 15}}) {
    auto fit = exp_trend_fit(planted(a, b, c, n));
    CHECK_FALSE(fit.degenerate);
    CHECK(fit.a == doctest::Approx(a).epsilon(1e-3));
    CHECK(fit.b == doctest::Approx(b).epsilon(1e-3));
    CHECK(fit.c == doctest::Approx(c).epsilon(1e-3));
    CHECK(fit(n / 2.0) == doctest::Approx(a * std::exp(b * n / 2.0) + c).epsilon(1e-6));
    auto again = exp_trend_fit(planted(a, b, c, n));
    CHECK(again.a == fit.a);
    CHECK(again.b == fit.b);
    CHECK(again.c == fit.c);
  }
}

TEST_CASE("exp_trend_fit edge cases") {
  std::vector<TrendPoint> flat{{1, 5}, {2, 5}, {3, 5}, {4, 5}, {5, 5}};
  auto fit = exp_trend_fit(flat);
  CHECK(fit.degenerate);
  CHECK(fit.a == 0.0);
  CHECK(fit.b == 0.0);
  CHECK(fit.c == 5.0);
  std::vector<TrendPoint> three{{1, 1}, {2, 2}, {3, 4}};
  CHECK(code_of([&] { exp_trend_fit(three); }) == ErrorCode::InsufficientPoints);
  std::vector<TrendPoint> repeated_x{{1, 1}, {1, 2}, {2, 4}, {2, 3}, {3, 9}};
  CHECK(code_of([&] { exp_trend_fit(repeated_x); }) == ErrorCode::InsufficientPoints);
}

TEST_CASE("powerlaw_fit recovers a planted exponent") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> degrees(10000);
    for (auto& k : degrees) k = sample_zeta(rng, 2.1);
    auto fit = powerlaw_fit(degrees);
    CHECK(fit.kmin == 1);
    CHECK(fit.n_tail == 10000);
    CHECK(std::abs(fit.gamma - 2.1) <= 0.1);
    CHECK(std::isfinite(fit.gamma_loglog));
  }
}

TEST_CASE("powerlaw_fit approximation agrees with the exact MLE for larger kmin") {
  std::mt19937_64 rng(99);
  std::vector<std::uint64_t> degrees(200000);
  for (auto& k : degrees) k = sample_zeta(rng, 2.5);
  auto fit = powerlaw_fit(degrees, 6);
  CHECK(fit.n_tail < degrees.size());
  CHECK(fit.gamma == doctest::Approx(2.5).epsilon(0.04));
  CHECK(fit.gamma_approx == doctest::Approx(fit.gamma).epsilon(0.02));
}

TEST_CASE("powerlaw_fit on too small a tail") {
  std::vector<std::uint64_t> few{1, 2, 3, 4, 5};
  CHECK(code_of([&] { powerlaw_fit(few); }) == ErrorCode::TailTooSmall);
  std::vector<std::uint64_t> flat(50, 3);
  CHECK(code_of([&] { powerlaw_fit(flat); }) == ErrorCode::TailTooSmall);
}

TEST_CASE("structure_entropy") {
  std::mt19937_64 rng(4);
  for (std::size_t k : {1u, 2u, 3u, 5u}) {
    for (std::size_t nodes : {10u, 30u, 64u}) {
      if ((nodes * k) % 2) continue;
      CHECK(std::abs(structure_entropy(regular_graph(rng, nodes, k)) - 1.0) < 1e-12);
    }
  }
  CHECK(std::abs(structure_entropy(complete_graph(7)) - 1.0) < 1e-12);
  CHECK(std::abs(structure_entropy(cycle_graph(9)) - 1.0) < 1e-12);
  CHECK(std::abs(structure_entropy(star_graph(3)) - 0.8962406251802889) < 1e-6);
  // isolates are ignored
  CHECK(structure_entropy(snap({{1, 2}}, {3, 4})) == doctest::Approx(1.0));
  CHECK(code_of([] { structure_entropy(Graph{}); }) == ErrorCode::EmptyGraph);
  CHECK(code_of([] { structure_entropy(snap({}, {1, 2})); }) == ErrorCode::EmptyGraph);
}

TEST_CASE("closing triangles among hubs lowers entropy") {
  // three hubs with eight leaves each, then the hubs are joined into a triangle
  std::vector<Edge> edges;
  for (std::uint64_t h = 1; h <= 3; ++h)
    for (std::uint64_t l = 0; l < 8; ++l) edges.push_back(Edge{NodeId{h}, NodeId{100 * h + l}});
  double before = structure_entropy(Graph::from_edges(edges));
  edges.push_back(e(1, 2));
  edges.push_back(e(2, 3));
  edges.push_back(e(1, 3));
  double after = structure_entropy(Graph::from_edges(edges));
  CHECK(after < before);
}

TEST_CASE("detect_mutations on a fixture") {
  std::vector<M3Rate> rates{{1, 2, 0.0123, 0.0499}, {2, 3, 0.0671, 0.0201}, {3, 4, std::nullopt, 0.03}};
  std::map<int, double> entropy{{1, 0.1756}, {2, 0.17}, {3, 0.1654}};
  auto events = detect_mutations(rates, 0.03, entropy);
  REQUIRE(events.size() == 2);
  CHECK(events[0].pair_from == 1);
  CHECK(events[0].side == Side::Death);
  CHECK(events[0].rate == 0.0499);
  CHECK(events[0].entropy_before == 0.1756);
  CHECK(events[0].entropy_after == 0.17);
  CHECK(events[1].pair_from == 2);
  CHECK(events[1].side == Side::Birth);
  CHECK(events[1].rate == 0.0671);
  CHECK(events[1].threshold == 0.03);
  CHECK(std::isnan(detect_mutations(rates, 0.03, {})[0].entropy_after));

  auto key = [](const MutationEvent& m) { return std::pair{m.pair_from, int(m.side)}; };
  std::vector<std::set<std::pair<int, int>>> fired;
  for (double t : {0.01, 0.03, 0.07}) {
    std::set<std::pair<int, int>> s;
    for (const auto& m : detect_mutations(rates, t, entropy)) s.insert(key(m));
    fired.push_back(s);
  }
  CHECK(fired[0].size() == 5);
  CHECK(std::includes(fired[0].begin(), fired[0].end(), fired[1].begin(), fired[1].end()));
  CHECK(std::includes(fired[1].begin(), fired[1].end(), fired[2].begin(), fired[2].end()));
  CHECK(fired[2].empty());

  CHECK(code_of([&] { detect_mutations(rates, 0.0, entropy); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { detect_mutations(rates, 1.0, entropy); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("node_trajectory") {
  SnapshotSeries s({snap({{1, 2}}, {}, 1, "200001"), snap({{3, 4}}, {}, 2, "200002"),
                    snap({{1, 3}, {1, 4}}, {}, 3, "200003")},
                   1);
  auto t = node_trajectory(s, n(1));
  CHECK(t.first_seen == 1);
  CHECK(t.last_seen == 3);
  REQUIRE(t.points.size() == 3);
  CHECK(t.points[0].degree == 1u);
  CHECK_FALSE(t.points[1].degree.has_value());
  CHECK(t.points[2].degree == 2u);
  CHECK(t.points[2].timestamp == YearMonth{2000, 3});
  CHECK(code_of([&] { node_trajectory(s, n(42)); }) == ErrorCode::NeverSeen);
}
