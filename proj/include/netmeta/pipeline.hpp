#pragma once

// Series manifests, report serialization, and the full analysis pipeline.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netmeta/census.hpp"
#include "netmeta/evolution.hpp"
#include "netmeta/graph.hpp"
#include "netmeta/metrics.hpp"

namespace netmeta {

inline constexpr const char* kToolVersion = "0.1.0";

struct ManifestEntry {
  int index{0};
  YearMonth timestamp;
  std::filesystem::path path;  // as written in the manifest
};

// manifest.json: {"window_months": 1 | null,
//                 "snapshots": [{"index", "timestamp", "path"}, ...]}
// Relative paths resolve against the manifest's directory.
class SeriesManifest {
 public:
  SeriesManifest() = default;
  SeriesManifest(std::vector<ManifestEntry> entries, std::optional<int> window_months,
                 std::filesystem::path base_dir = {});

  // Throws ManifestError on malformed JSON, non-consecutive indices,
  // non-increasing timestamps or missing snapshot files.
  static SeriesManifest load(const std::filesystem::path& file);

  nlohmann::ordered_json to_json() const;
  std::span<const ManifestEntry> entries() const { return entries_; }
  std::optional<int> window_months() const { return window_months_; }
  std::filesystem::path resolve(const ManifestEntry& e) const;

  SnapshotSeries load_series() const;

 private:
  void validate() const;

  std::vector<ManifestEntry> entries_;
  std::optional<int> window_months_;
  std::filesystem::path base_dir_;
};

// Writes <dir>/<YYYYMM>.txt per snapshot plus <dir>/manifest.json.
SeriesManifest write_series(const SnapshotSeries& series, const std::filesystem::path& dir);

struct PipelineOptions {
  Scope scope{Scope::All};
  double threshold{0.03};
  unsigned threads{1};
};

struct FitOutcome {
  std::optional<TrendFit> fit;
  std::string status;  // "ok", "degenerate", "insufficient_points"
};

struct Analysis {
  std::vector<EvolutionDelta> deltas;
  std::vector<CensusTable> tables;
  std::vector<MotifCounts> static_counts;  // per snapshot
  std::vector<M3Rate> rates;
  MetricsSeries metrics;
  std::vector<MutationEvent> mutations;
  FitOutcome born_inner_fit;
  FitOutcome dead_inner_fit;
};

std::vector<EvolutionDelta> classify_series(const SnapshotSeries& series, unsigned threads = 1);
std::vector<CensusTable> census_series(std::span<const EvolutionDelta> deltas, unsigned threads = 1);
std::vector<MotifCounts> static_census_series(const SnapshotSeries& series, unsigned threads = 1);

// x = 1-based pair index, y = |E_born^inner| (or dead).
FitOutcome fit_inner_trend(std::span<const EvolutionDelta> deltas, Side side);

Analysis analyze(const SnapshotSeries& series, const PipelineOptions& options);

// 17 significant digits; NotDefined / missing as "nan".
std::string format_real(std::optional<double> v);

std::string deltas_csv(std::span<const EvolutionDelta> deltas);
std::string census_csv(std::span<const CensusTable> tables, std::span<const MotifCounts> static_counts);
std::string metrics_csv(const MetricsSeries& metrics);
nlohmann::ordered_json mutations_json(std::span<const MutationEvent> events);
nlohmann::ordered_json fits_json(const Analysis& analysis);

using Bundle = std::vector<std::pair<std::string, std::string>>;  // file name -> contents

// deltas.csv, census.csv, metrics.csv, mutations.json, fits.json.
Bundle report_bundle(const Analysis& analysis);

// Writes every file or none: on failure, files already written are removed
// and the error is rethrown.
void write_bundle(const Bundle& bundle, const std::filesystem::path& dir);

// The full run: analysis bundle plus run-metadata.json.
void run_pipeline(const std::filesystem::path& manifest_file, const PipelineOptions& options,
                  const std::filesystem::path& out_dir);

std::string sha256_hex(std::string_view data);

}  // namespace netmeta
