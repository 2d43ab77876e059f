#include "netmeta/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include "netmeta/error.hpp"
#include "netmeta/parallel.hpp"

namespace netmeta {

Scope parse_scope(std::string_view text) {
  if (text == "all") return Scope::All;
  if (text == "inner") return Scope::Inner;
  if (text == "boundary") return Scope::Boundary;
  if (text == "outer") return Scope::Outer;
  throw Error(ErrorCode::InvalidConfig, fmt::format("unknown scope '{}'", text));
}

std::string_view to_string(Scope s) {
  switch (s) {
    case Scope::All: return "all";
    case Scope::Inner: return "inner";
    case Scope::Boundary: return "boundary";
    case Scope::Outer: return "outer";
  }
  return "?";
}

// ---------------------------------------------------------------- metabolism

double metabolism_term(const EvolutionDelta& delta, std::size_t edges_from, Scope scope) {
  if (edges_from == 0) {
    throw Error(ErrorCode::EmptySnapshot, fmt::format("snapshot {} has no edges", delta.from_index));
  }
  std::size_t born = 0, dead = 0;
  switch (scope) {
    case Scope::All:
      born = delta.born_edge_count();
      dead = delta.dead_edge_count();
      break;
    case Scope::Inner:
      born = delta.born_inner.size();
      dead = delta.dead_inner.size();
      break;
    case Scope::Boundary:
      born = delta.born_boundary.size();
      dead = delta.dead_boundary.size();
      break;
    case Scope::Outer:
      born = delta.born_outer.size();
      dead = delta.dead_outer.size();
      break;
  }
  double diff = born > dead ? double(born - dead) : double(dead - born);
  return diff / double(edges_from);
}

double metabolism_rate(const SnapshotSeries& series, std::span<const EvolutionDelta> deltas, Scope scope) {
  if (series.size() < 2 || deltas.size() != series.size() - 1) {
    throw Error(ErrorCode::InvalidSeries, fmt::format("{} snapshots need {} deltas, got {}", series.size(),
                                                      series.size() > 0 ? series.size() - 1 : 0, deltas.size()));
  }
  double sum = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i].from_index != series[i].index() || deltas[i].to_index != series[i + 1].index()) {
      throw Error(ErrorCode::InvalidSeries,
                  fmt::format("delta ({}, {}) does not match pair ({}, {})", deltas[i].from_index,
                              deltas[i].to_index, series[i].index(), series[i + 1].index()));
    }
    sum += metabolism_term(deltas[i], series[i].edges().size(), scope);
  }
  return sum / double(deltas.size());
}

// ---------------------------------------------------------------- trend fit

double TrendFit::operator()(double x) const { return a * std::exp(b * x) + c; }

namespace {

struct Projection {
  double scale{0};   // coefficient of exp(b (x - x_ref))
  double offset{0};
  double sse{0};
};

// Best (a, c) for a fixed rate b, with the basis anchored at x_ref.
Projection project(std::span<const TrendPoint> pts, double b, double x_ref) {
  const double n = double(pts.size());
  double ybar = 0;
  for (const auto& p : pts) ybar += p.y;
  ybar /= n;

  Projection out;
  if (b != 0.0) {
    std::vector<double> f(pts.size());
    double fbar = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      f[i] = std::exp(b * (pts[i].x - x_ref));
      fbar += f[i];
    }
    fbar /= n;
    double sff = 0, sfy = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sff += (f[i] - fbar) * (f[i] - fbar);
      sfy += (f[i] - fbar) * (pts[i].y - ybar);
    }
    if (sff > 0 && std::isfinite(sff)) {
      out.scale = sfy / sff;
      out.offset = ybar - out.scale * fbar;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        double r = pts[i].y - (out.scale * f[i] + out.offset);
        out.sse += r * r;
      }
      return out;
    }
  }
  out.offset = ybar;
  for (const auto& p : pts) out.sse += (p.y - ybar) * (p.y - ybar);
  return out;
}

}  // namespace

TrendFit exp_trend_fit(std::span<const TrendPoint> points) {
  std::vector<double> xs;
  for (const auto& p : points) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.size() < 4) {
    throw Error(ErrorCode::InsufficientPoints,
                fmt::format("trend fit needs 4 distinct x values, got {}", xs.size()));
  }

  TrendFit fit;
  fit.x_min = xs.front();
  fit.x_max = xs.back();
  fit.n_points = points.size();

  bool constant = std::all_of(points.begin(), points.end(), [&](const TrendPoint& p) { return p.y == points[0].y; });
  if (constant) {
    fit.c = points[0].y;
    fit.degenerate = true;
    return fit;
  }

  const double span = fit.x_max - fit.x_min;
  const double x_ref = fit.x_min;
  auto sse = [&](double b) { return project(points, b, x_ref).sse; };

  // Rates from 1e-4 to 50 e-foldings over the x span, both signs, plus b = 0.
  std::vector<double> grid;
  constexpr int kSteps = 114;
  const double lo_exp = -4.0, hi_exp = std::log10(50.0);
  for (int k = kSteps; k >= 0; --k) grid.push_back(-std::pow(10.0, lo_exp + (hi_exp - lo_exp) * k / kSteps) / span);
  grid.push_back(0.0);
  for (int k = 0; k <= kSteps; ++k) grid.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * k / kSteps) / span);

  std::size_t best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = sse(grid[i]);
    if (s < best_sse) {
      best_sse = s;
      best = i;
    }
  }

  double lo = grid[best > 0 ? best - 1 : 0];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = sse(x1), f2 = sse(x2);
  while (hi - lo > 1e-9) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = sse(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = sse(x2);
    }
  }
  double b = 0.5 * (lo + hi);
  double candidate_sse = sse(b);
  if (best_sse < candidate_sse) {
    b = grid[best];
  }

  Projection proj = project(points, b, x_ref);
  fit.b = proj.scale == 0.0 ? 0.0 : b;
  fit.a = proj.scale * std::exp(-fit.b * x_ref);
  fit.c = proj.offset;
  fit.sse = proj.sse;
  return fit;
}

// ---------------------------------------------------------------- power law

namespace {

// ln ζ(s, q) via GSL, with its abort-on-error handler disabled.
double log_hurwitz_zeta(double s, double q) {
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  gsl_sf_result r;
  int status = gsl_sf_hzeta_e(s, q, &r);
  if (status != GSL_SUCCESS || !(r.val > 0)) return std::numeric_limits<double>::infinity();
  return std::log(r.val);
}

}  // namespace

PowerLawFit powerlaw_fit(std::span<const std::uint64_t> degrees, std::optional<std::uint64_t> kmin) {
  std::uint64_t k0 = 0;
  if (kmin) {
    if (*kmin == 0) throw Error(ErrorCode::InvalidConfig, "kmin must be positive");
    k0 = *kmin;
  } else {
    k0 = std::numeric_limits<std::uint64_t>::max();
    for (auto k : degrees) {
      if (k >= 1) k0 = std::min(k0, k);
    }
  }

  std::vector<std::uint64_t> tail;
  for (auto k : degrees) {
    if (k >= k0 && k >= 1) tail.push_back(k);
  }
  if (tail.size() < 10) {
    throw Error(ErrorCode::TailTooSmall, fmt::format("{} degrees at or above kmin, need 10", tail.size()));
  }
  std::sort(tail.begin(), tail.end());
  if (tail.front() == tail.back()) {
    throw Error(ErrorCode::TailTooSmall, fmt::format("every tail degree equals {}", tail.front()));
  }

  PowerLawFit fit;
  fit.kmin = k0;
  fit.n_tail = tail.size();
  const double n = double(tail.size());

  double shifted = 0, log_sum = 0;
  for (auto k : tail) {
    shifted += std::log(double(k) / (double(k0) - 0.5));
    log_sum += std::log(double(k));
  }
  fit.gamma_approx = 1.0 + n / shifted;

  // Discrete log-likelihood -n ln ζ(γ, kmin) - γ Σ ln k is concave in γ.
  auto neg_loglik = [&](double g) { return n * log_hurwitz_zeta(g, double(k0)) + g * log_sum; };
  double lo = 1.0 + 1e-6, hi = 50.0;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = neg_loglik(x1), f2 = neg_loglik(x2);
  while (hi - lo > 1e-9) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = neg_loglik(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = neg_loglik(x2);
    }
  }
  fit.gamma = 0.5 * (lo + hi);

  // Least-squares slope of ln P(K >= k) against ln k over distinct k.
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < tail.size();) {
    std::size_t j = i;
    while (j < tail.size() && tail[j] == tail[i]) ++j;
    lx.push_back(std::log(double(tail[i])));
    ly.push_back(std::log(double(tail.size() - i) / n));
    i = j;
  }
  double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / double(lx.size());
  double my = std::accumulate(ly.begin(), ly.end(), 0.0) / double(ly.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  fit.gamma_loglog = 1.0 - sxy / sxx;
  return fit;
}

PowerLawFit powerlaw_fit(const std::map<NodeId, std::size_t>& degrees, std::optional<std::uint64_t> kmin) {
  std::vector<std::uint64_t> values;
  values.reserve(degrees.size());
  for (const auto& [node, k] : degrees) values.push_back(k);
  return powerlaw_fit(values, kmin);
}

// ---------------------------------------------------------------- entropy

double structure_entropy(const Graph& g) {
  if (g.edge_count() == 0) {
    throw Error(ErrorCode::EmptyGraph, "structure entropy needs at least one edge");
  }
  // H = ln S - Σ d ln d / S with S = 2|E|.
  const double total = 2.0 * double(g.edge_count());
  double weighted = 0;
  std::size_t active = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    double d = double(g.neighbors_at(i).size());
    if (d > 0) {
      weighted += d * std::log(d);
      ++active;
    }
  }
  double h = std::log(total) - weighted / total;
  return std::clamp(h / std::log(double(active)), 0.0, 1.0);
}

double structure_entropy(const Snapshot& g) { return structure_entropy(g.graph()); }

// ---------------------------------------------------------------- mutations

std::vector<MutationEvent> detect_mutations(std::span<const M3Rate> rates, double threshold,
                                            const std::map<int, double>& entropies) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("threshold {} is outside (0, 1)", threshold));
  }
  auto entropy_of = [&](int index) {
    auto it = entropies.find(index);
    return it == entropies.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
  };
  std::vector<MutationEvent> events;
  for (const auto& r : rates) {
    for (Side side : {Side::Birth, Side::Death}) {
      const auto& rate = side == Side::Birth ? r.birth_rate : r.death_rate;
      if (rate && *rate > threshold) {
        events.push_back({r.from_index, r.to_index, side, *rate, threshold, entropy_of(r.from_index),
                          entropy_of(r.to_index)});
      }
    }
  }
  return events;
}

// ---------------------------------------------------------------- trajectory

NodeTrajectory node_trajectory(const SnapshotSeries& series, NodeId node) {
  NodeTrajectory t;
  t.node = node;
  bool seen = false;
  for (const auto& g : series.snapshots()) {
    TrajectoryPoint p{g.index(), g.timestamp(), std::nullopt};
    if (g.graph().contains(node)) {
      p.degree = g.graph().degree(node);
      if (!seen) t.first_seen = g.index();
      t.last_seen = g.index();
      seen = true;
    }
    t.points.push_back(p);
  }
  if (!seen) {
    throw Error(ErrorCode::NeverSeen, fmt::format("node {} is absent from every snapshot", node.value));
  }
  return t;
}

// ---------------------------------------------------------------- series

std::vector<SnapshotMetrics> snapshot_metrics(const SnapshotSeries& series, unsigned threads) {
  std::vector<SnapshotMetrics> out(series.size());
  parallel_for(series.size(), threads, [&](std::size_t i) {
    const Snapshot& g = series[i];
    SnapshotMetrics m{g.index(), g.timestamp(), g.nodes().size(), g.edges().size(), std::nullopt, std::nullopt};
    try {
      m.powerlaw = powerlaw_fit(degree_sequence(g));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TailTooSmall) throw;
    }
    if (g.edges().size() > 0) m.entropy = structure_entropy(g);
    out[i] = std::move(m);
  });
  return out;
}

MetricsSeries compute_metrics(const SnapshotSeries& series, std::span<const EvolutionDelta> deltas,
                              std::span<const M3Rate> rates, Scope scope, unsigned threads) {
  MetricsSeries ms;
  ms.scope = scope;
  ms.r = metabolism_rate(series, deltas, scope);
  ms.snapshots = snapshot_metrics(series, threads);
  if (rates.size() != deltas.size()) {
    throw Error(ErrorCode::InvalidSeries, fmt::format("{} rates for {} pairs", rates.size(), deltas.size()));
  }
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto& d = deltas[i];
    PairMetrics p;
    p.from_index = d.from_index;
    p.to_index = d.to_index;
    p.born = {d.born_inner.size(), d.born_boundary.size(), d.born_outer.size()};
    p.dead = {d.dead_inner.size(), d.dead_boundary.size(), d.dead_outer.size()};
    p.r_term = metabolism_term(d, series[i].edges().size(), scope);
    p.m3 = rates[i];
    ms.pairs.push_back(p);
  }
  return ms;
}

}  // namespace netmeta
