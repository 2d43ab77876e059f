// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   netmeta_acceptance <path-to-netmeta-cli> <test-data-dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netmeta/census.hpp"
#include "netmeta/evolution.hpp"
#include "netmeta/ingest.hpp"
#include "netmeta/metrics.hpp"
#include "netmeta/pipeline.hpp"
#include "test_support.hpp"

using namespace netmeta;
using namespace netmeta::testing;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_data;

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int sh(const std::string& cmd) {
  int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("netmeta_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool rel_close(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

// 1000 seeded pairs shared by the partition, boundary and census criteria.
const std::vector<std::pair<Snapshot, Snapshot>>& random_pairs() {
  static const auto pairs = [] {
    std::mt19937_64 rng(1998);
    std::vector<std::pair<Snapshot, Snapshot>> out;
    for (int i = 0; i < 1000; ++i) out.push_back(random_pair(rng, 100));
    return out;
  }();
  return pairs;
}

void partition_suite() {
  for (const auto& [gi, gj] : random_pairs()) {
    auto d = classify_pair(gi, gj);
    auto oracle = brute_classify(gi.graph(), gj.graph());
    expect(as_set(d.steady_nodes) == oracle.steady && as_set(d.born_nodes) == oracle.born &&
               as_set(d.dead_nodes) == oracle.dead,
           "node classes differ from the set oracle");

    std::set<NodeId> ni(gi.nodes().begin(), gi.nodes().end()), nj(gj.nodes().begin(), gj.nodes().end());
    std::set<NodeId> steady_dead = as_set(d.steady_nodes), steady_born = as_set(d.steady_nodes);
    steady_dead.insert(d.dead_nodes.begin(), d.dead_nodes.end());
    steady_born.insert(d.born_nodes.begin(), d.born_nodes.end());
    expect(steady_dead == ni && d.steady_nodes.size() + d.dead_nodes.size() == ni.size(),
           "steady + dead does not partition N(i)");
    expect(steady_born == nj && d.steady_nodes.size() + d.born_nodes.size() == nj.size(),
           "steady + born does not partition N(i+1)");

    std::set<Edge> ei(gi.edges().begin(), gi.edges().end()), ej(gj.edges().begin(), gj.edges().end());
    std::set<Edge> gone, fresh, dead_union, born_union;
    for (const auto& x : ei)
      if (!ej.count(x)) gone.insert(x);
    for (const auto& x : ej)
      if (!ei.count(x)) fresh.insert(x);
    for (auto* v : {&d.dead_outer, &d.dead_boundary, &d.dead_inner}) dead_union.insert(v->begin(), v->end());
    for (auto* v : {&d.born_outer, &d.born_boundary, &d.born_inner}) born_union.insert(v->begin(), v->end());
    expect(dead_union == gone && d.dead_edge_count() == gone.size(), "dead classes do not partition E(i) - E(i+1)");
    expect(born_union == fresh && d.born_edge_count() == fresh.size(),
           "born classes do not partition E(i+1) - E(i)");

    Snapshot ri(1, gj.timestamp(), gj.graph()), rj(2, gi.timestamp(), gi.graph());
    auto r = classify_pair(ri, rj);
    expect(r.born_nodes == d.dead_nodes && r.dead_nodes == d.born_nodes && r.born_outer == d.dead_outer &&
               r.born_boundary == d.dead_boundary && r.born_inner == d.dead_inner && r.dead_outer == d.born_outer &&
               r.dead_boundary == d.born_boundary && r.dead_inner == d.born_inner,
           "time reversal does not swap born and dead");
  }
}

void motif_oracle() {
  std::mt19937_64 rng(60);
  std::uniform_int_distribution<std::uint64_t> size(3, 60);
  std::uniform_real_distribution<double> density(0.02, 0.5);
  for (int i = 0; i < 50; ++i) {
    auto g = random_graph(rng, size(rng), density(rng));
    auto fast = static_census(g);
    expect(fast == brute_census(g), "static_census differs from brute force");
    std::uint64_t wedges = 0;
    for (auto v : g.nodes()) {
      std::uint64_t d = g.degree(v);
      wedges += d * (d - (d > 0 ? 1 : 0)) / 2;
    }
    expect(fast.m2 + 3 * fast.m3 == wedges, "m2 + 3*m3 != sum C(deg, 2)");
  }
}

void canonical_counts() {
  expect(static_census(complete_graph(3)) == MotifCounts{3, 0, 1}, "K3");
  expect(static_census(complete_graph(4)) == MotifCounts{6, 0, 4}, "K4");
  expect(static_census(snap({{1, 2}, {2, 3}})) == MotifCounts{2, 1, 0}, "path3");
  expect(static_census(star_graph(3)) == MotifCounts{3, 3, 0}, "K1,3");
}

void boundary_theorem() {
  for (const auto& [gi, gj] : random_pairs()) {
    auto t = delta_census(classify_pair(gi, gj));
    expect(t.at(Side::Birth, EdgeClass::Boundary).m3 == 0 && t.at(Side::Death, EdgeClass::Boundary).m3 == 0,
           "boundary class holds a triangle");
  }
}

void census_consistency() {
  for (const auto& [gi, gj] : random_pairs()) {
    auto d = classify_pair(gi, gj);
    auto t = delta_census(d);
    for (Side side : {Side::Birth, Side::Death}) {
      for (EdgeClass cls : {EdgeClass::Inner, EdgeClass::Boundary, EdgeClass::Outer}) {
        expect(t.at(side, cls).m1 == d.edges(side, cls).size(), "class m1 differs from class edge count");
      }
    }
  }
}

void metabolism_cases() {
  std::vector<Edge> ei;
  std::vector<NodeId> all;
  for (std::uint64_t a = 0; a < 100; ++a) {
    ei.push_back(Edge{NodeId{a}, NodeId{a + 1000}});
    all.push_back(NodeId{a});
    all.push_back(NodeId{a + 1000});
  }
  std::vector<Edge> ej(ei.begin() + 2, ei.end());
  for (std::uint64_t a = 0; a < 12; ++a) ej.push_back(Edge{NodeId{a + 2}, NodeId{a + 1003}});
  SnapshotSeries s({snap_from(ei, all, 1, {2000, 1}), snap_from(ej, all, 2, {2000, 2})}, 1);
  std::vector<EvolutionDelta> d{classify_pair(s[0], s[1])};
  expect(d[0].born_edge_count() == 12 && d[0].dead_edge_count() == 2, "fixture is not 12 born / 2 dead");
  double r = metabolism_rate(s, d);
  expect(r == 0.10, "r = " + format_real(r) + ", want 0.1");

  SnapshotSeries same({snap_from(ei, all, 1, {2000, 1}), snap_from(ei, all, 2, {2000, 2})}, 1);
  std::vector<EvolutionDelta> ds{classify_pair(same[0], same[1])};
  expect(metabolism_rate(same, ds) == 0.0, "identical series r != 0");
}

void trend_recovery() {
  struct Case {
    double a, b, c;
    int n;
  };
  for (auto [a, b, c, n] : {Case{2, 0.2, 1, 20}, Case{712.34, 1 / 79.97, 253.41, 183}}) {
    std::vector<TrendPoint> pts;
    for (int x = 1; x <= n; ++x) pts.push_back({double(x), a * std::exp(b * x) + c});
    auto fit = exp_trend_fit(pts);
    auto again = exp_trend_fit(pts);
    expect(rel_close(fit.a, a, 1e-3) && rel_close(fit.b, b, 1e-3) && rel_close(fit.c, c, 1e-3),
           "fit (" + format_real(fit.a) + ", " + format_real(fit.b) + ", " + format_real(fit.c) + ")");
    expect(fit.a == again.a && fit.b == again.b && fit.c == again.c, "fit is not deterministic");
  }
}

void powerlaw_recovery() {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    std::vector<std::uint64_t> degrees(10000);
    for (auto& k : degrees) k = sample_zeta(rng, 2.1);
    auto fit = powerlaw_fit(degrees);
    expect(std::abs(fit.gamma - 2.1) <= 0.1,
           "seed " + std::to_string(seed) + ": gamma = " + format_real(fit.gamma));
  }
}

void entropy_cases() {
  std::mt19937_64 rng(12);
  std::vector<Graph> regular{complete_graph(5), complete_graph(12), cycle_graph(3), cycle_graph(50)};
  // disjoint copies of K4 (3-regular) and a perfect matching (1-regular)
  std::vector<Edge> k4s, matching;
  for (std::uint64_t c = 0; c < 6; ++c)
    for (std::uint64_t a = 0; a < 4; ++a)
      for (std::uint64_t b = a + 1; b < 4; ++b) k4s.push_back(Edge{NodeId{c * 4 + a}, NodeId{c * 4 + b}});
  for (std::uint64_t a = 0; a < 40; a += 2) matching.push_back(Edge{NodeId{a}, NodeId{a + 1}});
  regular.push_back(Graph::from_edges(k4s));
  regular.push_back(Graph::from_edges(matching));
  for (const auto& g : regular) {
    double h = structure_entropy(g);
    expect(std::abs(h - 1.0) <= 1e-12, "regular graph entropy " + format_real(h));
  }
  double star = structure_entropy(star_graph(3));
  expect(std::abs(star - 0.8962406251802889) <= 1e-6, "K1,3 entropy " + format_real(star));

  std::vector<Edge> hubs;
  for (std::uint64_t h = 1; h <= 3; ++h)
    for (std::uint64_t l = 0; l < 8; ++l) hubs.push_back(Edge{NodeId{h}, NodeId{100 * h + l}});
  double before = structure_entropy(Graph::from_edges(hubs));
  hubs.push_back(e(1, 2));
  hubs.push_back(e(2, 3));
  hubs.push_back(e(1, 3));
  double after = structure_entropy(Graph::from_edges(hubs));
  expect(after < before, "closing triangles on hubs did not lower entropy");
}

void mutation_cases() {
  std::vector<M3Rate> rates{{1, 2, 0.0100, 0.0499}, {2, 3, 0.0671, 0.0150}, {3, 4, std::nullopt, 0.0300}};
  std::map<int, double> entropy{{1, 0.1756}, {2, 0.1702}, {3, 0.1654}, {4, 0.1650}};
  auto events = detect_mutations(rates, 0.03, entropy);
  expect(events.size() == 2, std::to_string(events.size()) + " events at 0.03, want 2");
  expect(events[0].pair_from == 1 && events[0].side == Side::Death && events[0].rate == 0.0499,
         "first event is not the 0.0499 death");
  expect(events[1].pair_from == 2 && events[1].side == Side::Birth && events[1].rate == 0.0671,
         "second event is not the 0.0671 birth");

  std::vector<std::set<std::pair<int, int>>> fired;
  for (double t : {0.01, 0.03, 0.07}) {
    std::set<std::pair<int, int>> s;
    for (const auto& m : detect_mutations(rates, t, entropy)) s.insert({m.pair_from, int(m.side)});
    fired.push_back(s);
  }
  expect(std::includes(fired[0].begin(), fired[0].end(), fired[1].begin(), fired[1].end()) &&
             std::includes(fired[1].begin(), fired[1].end(), fired[2].begin(), fired[2].end()),
         "events at a higher threshold are not a subset");
  expect(fired[0].size() == 4 && fired[2].empty(), "unexpected event counts at 0.01 / 0.07");
}

void ingestion_fixture() {
  fs::path out = scratch("ingest");
  int rc = sh(g_cli + " ingest --format aspath --profile path-per-line --out " + out.string() + " " +
              (g_data / "aspath" / "rib.19980115.txt").string());
  expect(rc == 0, "ingest exited " + std::to_string(rc));
  expect(slurp(out / "199801.txt") == slurp(g_data / "expected" / "199801.txt"), "snapshot differs from expected");
  expect(slurp(out / "ingest-report.json") == slurp(g_data / "expected" / "ingest-report.json"),
         "ingest-report.json differs from expected");
}

void end_to_end() {
  fs::path base = scratch("e2e");
  expect(sh(g_cli + " synth --seed 42 --out " + (base / "series").string()) == 0, "synth failed");
  std::string manifest = (base / "series" / "manifest.json").string();
  for (auto run : {"a", "b"}) {
    expect(sh("SOURCE_DATE_EPOCH=0 " + g_cli + " run --series " + manifest + " --out " + (base / run).string()) == 0,
           "run failed");
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    ++files;
    fs::path name = entry.path().filename();
    expect(slurp(base / "a" / name) == slurp(base / "b" / name), name.string() + " differs between runs");
  }
  expect(files == 6, "bundle has " + std::to_string(files) + " files");

  auto truth = nlohmann::json::parse(slurp(base / "series" / "truth.json"));
  auto series = SeriesManifest::load(manifest).load_series();
  const auto& steps = truth.at("steps");
  expect(steps.size() + 1 == series.size(), "truth and series lengths disagree");
  std::istringstream deltas(slurp(base / "a" / "deltas.csv"));
  std::string line;
  std::getline(deltas, line);
  for (std::size_t s = 0; s < steps.size(); ++s) {
    auto d = classify_pair(series[s], series[s + 1]);
    std::vector<std::uint64_t> born, dead;
    for (auto v : d.born_nodes) born.push_back(v.value);
    for (auto v : d.dead_nodes) dead.push_back(v.value);
    expect(born == steps[s].at("born_nodes").get<std::vector<std::uint64_t>>(), "born nodes differ at step " + std::to_string(s + 1));
    expect(dead == steps[s].at("dead_nodes").get<std::vector<std::uint64_t>>(), "dead nodes differ at step " + std::to_string(s + 1));
    std::getline(deltas, line);
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    expect(cells.size() == 11 && cells[3] == std::to_string(born.size()) && cells[4] == std::to_string(dead.size()),
           "deltas.csv node counts differ at step " + std::to_string(s + 1));
  }
}

struct Criterion {
  const char* name;
  std::function<void()> body;
  double budget_ms;  // 0 = untimed
};

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <netmeta-cli> <test-data-dir>\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];
  g_data = argv[2];

  const std::vector<Criterion> criteria{
      {"partition: 1000 random pairs, exact partitions and time reversal", partition_suite, 10000},
      {"motif oracle: 50 random graphs, census = brute force, wedge identity", motif_oracle, 10000},
      {"canonical counts: K3, K4, path3, K1,3", canonical_counts, 0},
      {"boundary classes hold no triangles on 1000 random deltas", boundary_theorem, 0},
      {"census m1 equals class edge count on 1000 random deltas", census_consistency, 0},
      {"metabolism: |E|=100, 12 born, 2 dead gives 0.10; identical series gives 0", metabolism_cases, 0},
      {"trend fit recovers (2, 0.2, 1) and (712.34, 1/79.97, 253.41)", trend_recovery, 5000},
      {"power law: gamma 2.1, n 10^4, 10 seeds within 0.1", powerlaw_recovery, 5000},
      {"entropy: regular graphs 1, K1,3 0.8962, hub triangles lower it", entropy_cases, 0},
      {"mutations: two events at 0.03, monotone in threshold", mutation_cases, 0},
      {"ingest: AS_PATH fixture matches expected snapshot and report", ingestion_fixture, 0},
      {"end to end: seed 42 runs are byte-identical, truth replays", end_to_end, 0},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string why;
    bool ok = true;
    try {
      c.body();
    } catch (const Failure& f) {
      ok = false;
      why = f.what;
    } catch (const std::exception& e) {
      ok = false;
      why = std::string("exception: ") + e.what();
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (ok && c.budget_ms > 0 && ms > c.budget_ms) {
      ok = false;
      why = "over the " + std::to_string(int(c.budget_ms)) + " ms budget";
    }
    std::printf("%s  %-75s %9.1f ms%s%s\n", ok ? "PASS" : "FAIL", c.name, ms, why.empty() ? "" : "  ", why.c_str());
    if (!ok) ++failed;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
