#pragma once

// Series-level statistics: metabolism rate, exponential trend fits, power-law
// exponents, normalized degree entropy, node trajectories and M3 mutations.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "netmeta/census.hpp"
#include "netmeta/evolution.hpp"
#include "netmeta/graph.hpp"

namespace netmeta {

// Which changed-edge classes enter the metabolism rate.
enum class Scope { All, Inner, Boundary, Outer };

Scope parse_scope(std::string_view text);
std::string_view to_string(Scope s);

// |born - dead| / |E(from)| for one pair, restricted to `scope`.
double metabolism_term(const EvolutionDelta& delta, std::size_t edges_from, Scope scope = Scope::All);

// Mean of metabolism_term over the n-1 consecutive pairs. Throws EmptySnapshot
// when some |E(i)| = 0, InvalidSeries when deltas do not line up.
double metabolism_rate(const SnapshotSeries& series, std::span<const EvolutionDelta> deltas,
                       Scope scope = Scope::All);

struct TrendPoint {
  double x;
  double y;
};

// y = a * exp(b * x) + c
struct TrendFit {
  double a{0};
  double b{0};
  double c{0};
  double sse{0};
  double x_min{0};
  double x_max{0};
  std::size_t n_points{0};
  bool degenerate{false};  // constant data: a = b = 0, c = mean

  double operator()(double x) const;
};

// Variable projection: golden-section search over b, seeded from a
// logarithmic grid, with (a, c) solved by linear least squares at each b.
// Throws InsufficientPoints with fewer than 4 distinct x values.
TrendFit exp_trend_fit(std::span<const TrendPoint> points);

enum class PowerLawMethod { Mle, LogLogRegression };

struct PowerLawFit {
  double gamma{0};         // exact discrete MLE
  double gamma_approx{0};  // 1 + n / Σ ln(k / (kmin - 1/2))
  double gamma_loglog{0};  // 1 - slope of the log-log CCDF
  std::uint64_t kmin{1};
  std::size_t n_tail{0};
  PowerLawMethod method{PowerLawMethod::Mle};
};

// kmin = nullopt picks the smallest positive degree. Throws TailTooSmall when
// fewer than 10 degrees reach kmin or the tail has a single distinct value.
PowerLawFit powerlaw_fit(std::span<const std::uint64_t> degrees, std::optional<std::uint64_t> kmin = std::nullopt);
PowerLawFit powerlaw_fit(const std::map<NodeId, std::size_t>& degrees,
                         std::optional<std::uint64_t> kmin = std::nullopt);

// Shannon entropy of deg(u) / 2|E| over nodes with nonzero degree, divided by
// ln(#such nodes). Throws EmptyGraph when there are no edges.
double structure_entropy(const Graph& g);
double structure_entropy(const Snapshot& g);

struct MutationEvent {
  int pair_from{0};
  int pair_to{0};
  Side side{Side::Birth};
  double rate{0};
  double threshold{0};
  double entropy_before{0};  // NaN when the snapshot has no edges
  double entropy_after{0};
};

// One event per (pair, side) whose defined rate is strictly above threshold,
// in pair order, birth before death within a pair. `entropies` is keyed by
// snapshot index. Throws InvalidConfig unless 0 < threshold < 1.
std::vector<MutationEvent> detect_mutations(std::span<const M3Rate> rates, double threshold,
                                            const std::map<int, double>& entropies);

struct TrajectoryPoint {
  int index{0};
  YearMonth timestamp;
  std::optional<std::size_t> degree;  // nullopt: absent from the snapshot
};

struct NodeTrajectory {
  NodeId node;
  std::vector<TrajectoryPoint> points;
  int first_seen{0};
  int last_seen{0};
};

// Throws NeverSeen if the node is absent from every snapshot.
NodeTrajectory node_trajectory(const SnapshotSeries& series, NodeId node);

struct SnapshotMetrics {
  int index{0};
  YearMonth timestamp;
  std::size_t nodes{0};
  std::size_t edges{0};
  std::optional<PowerLawFit> powerlaw;
  std::optional<double> entropy;
};

struct PairMetrics {
  int from_index{0};
  int to_index{0};
  std::array<std::size_t, 3> born{};  // inner, boundary, outer
  std::array<std::size_t, 3> dead{};
  double r_term{0};
  M3Rate m3;
};

struct MetricsSeries {
  Scope scope{Scope::All};
  double r{0};
  std::vector<SnapshotMetrics> snapshots;
  std::vector<PairMetrics> pairs;
};

// Per-snapshot statistics run on `threads` workers (0 or 1 = serial).
std::vector<SnapshotMetrics> snapshot_metrics(const SnapshotSeries& series, unsigned threads = 0);

MetricsSeries compute_metrics(const SnapshotSeries& series, std::span<const EvolutionDelta> deltas,
                              std::span<const M3Rate> rates, Scope scope, unsigned threads = 0);

}  // namespace netmeta
