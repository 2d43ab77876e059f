#include "netmeta/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "netmeta/error.hpp"
#include "netmeta/ingest.hpp"
#include "netmeta/parallel.hpp"

namespace netmeta {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open {}", file.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& file, std::string_view contents) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", file.string()));
}

nlohmann::ordered_json real_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

// ---------------------------------------------------------------- manifest

SeriesManifest::SeriesManifest(std::vector<ManifestEntry> entries, std::optional<int> window_months,
                               fs::path base_dir)
    : entries_(std::move(entries)), window_months_(window_months), base_dir_(std::move(base_dir)) {}

fs::path SeriesManifest::resolve(const ManifestEntry& e) const {
  return e.path.is_absolute() ? e.path : base_dir_ / e.path;
}

void SeriesManifest::validate() const {
  if (entries_.empty()) throw Error(ErrorCode::ManifestError, "manifest lists no snapshots");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.index != int(i) + 1) {
      throw Error(ErrorCode::ManifestError, fmt::format("entry {} has index {}, expected {}", i, e.index, i + 1));
    }
    if (i > 0 && !(entries_[i - 1].timestamp < e.timestamp)) {
      throw Error(ErrorCode::ManifestError, fmt::format("timestamp {} does not follow {}", e.timestamp.str(),
                                                        entries_[i - 1].timestamp.str()));
    }
    if (!fs::is_regular_file(resolve(e))) {
      throw Error(ErrorCode::ManifestError, fmt::format("snapshot file {} does not exist", resolve(e).string()));
    }
  }
}

SeriesManifest SeriesManifest::load(const fs::path& file) {
  if (!fs::is_regular_file(file)) {
    throw Error(ErrorCode::ManifestError, fmt::format("manifest {} does not exist", file.string()));
  }
  SeriesManifest m;
  m.base_dir_ = file.parent_path();
  try {
    auto j = nlohmann::json::parse(read_file(file));
    if (j.contains("window_months") && !j.at("window_months").is_null()) {
      m.window_months_ = j.at("window_months").get<int>();
    }
    for (const auto& s : j.at("snapshots")) {
      ManifestEntry e;
      e.index = s.at("index").get<int>();
      e.timestamp = YearMonth::parse(s.at("timestamp").get<std::string>());
      e.path = s.at("path").get<std::string>();
      m.entries_.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ManifestError, fmt::format("{}: {}", file.string(), e.what()));
  } catch (const Error& e) {
    throw Error(ErrorCode::ManifestError, fmt::format("{}: {}", file.string(), e.what()));
  }
  m.validate();
  return m;
}

nlohmann::ordered_json SeriesManifest::to_json() const {
  nlohmann::ordered_json j;
  j["window_months"] = window_months_ ? nlohmann::ordered_json(*window_months_) : nlohmann::ordered_json(nullptr);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    arr.push_back({{"index", e.index}, {"timestamp", e.timestamp.str()}, {"path", e.path.generic_string()}});
  }
  j["snapshots"] = std::move(arr);
  return j;
}

SnapshotSeries SeriesManifest::load_series() const {
  validate();
  std::vector<Snapshot> snapshots;
  for (const auto& e : entries_) snapshots.push_back(read_snapshot_file(resolve(e), e.index, e.timestamp));
  try {
    return SnapshotSeries(std::move(snapshots), window_months_);
  } catch (const Error& e) {
    throw Error(ErrorCode::ManifestError, e.detail());
  }
}

SeriesManifest write_series(const SnapshotSeries& series, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<ManifestEntry> entries;
  for (const auto& g : series.snapshots()) {
    fs::path name = g.timestamp().str() + ".txt";
    write_file(dir / name, format_canonical(g));
    entries.push_back({g.index(), g.timestamp(), name});
  }
  SeriesManifest manifest(std::move(entries), series.window_months(), dir);
  write_file(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

// ---------------------------------------------------------------- analysis

std::vector<EvolutionDelta> classify_series(const SnapshotSeries& series, unsigned threads) {
  std::size_t pairs = series.size() > 0 ? series.size() - 1 : 0;
  std::vector<EvolutionDelta> deltas(pairs);
  parallel_for(pairs, threads, [&](std::size_t i) { deltas[i] = classify_pair(series[i], series[i + 1]); });
  return deltas;
}

std::vector<CensusTable> census_series(std::span<const EvolutionDelta> deltas, unsigned threads) {
  std::vector<CensusTable> tables(deltas.size());
  parallel_for(deltas.size(), threads, [&](std::size_t i) { tables[i] = delta_census(deltas[i]); });
  return tables;
}

std::vector<MotifCounts> static_census_series(const SnapshotSeries& series, unsigned threads) {
  std::vector<MotifCounts> counts(series.size());
  parallel_for(series.size(), threads, [&](std::size_t i) { counts[i] = static_census(series[i]); });
  return counts;
}

FitOutcome fit_inner_trend(std::span<const EvolutionDelta> deltas, Side side) {
  std::vector<TrendPoint> pts;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto& d = deltas[i];
    double y = double(side == Side::Birth ? d.born_inner.size() : d.dead_inner.size());
    pts.push_back({double(i + 1), y});
  }
  FitOutcome out;
  try {
    out.fit = exp_trend_fit(pts);
    out.status = out.fit->degenerate ? "degenerate" : "ok";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientPoints) throw;
    out.status = "insufficient_points";
  }
  return out;
}

Analysis analyze(const SnapshotSeries& series, const PipelineOptions& options) {
  if (series.size() < 2) {
    throw Error(ErrorCode::InvalidSeries, "analysis needs at least two snapshots");
  }
  Analysis a;
  a.deltas = classify_series(series, options.threads);
  a.tables = census_series(a.deltas, options.threads);
  a.static_counts = static_census_series(series, options.threads);
  std::vector<std::uint64_t> m3;
  for (const auto& c : a.static_counts) m3.push_back(c.m3);
  a.rates = m3_rates(a.tables, m3);
  a.metrics = compute_metrics(series, a.deltas, a.rates, options.scope, options.threads);

  std::map<int, double> entropies;
  for (const auto& s : a.metrics.snapshots) {
    if (s.entropy) entropies[s.index] = *s.entropy;
  }
  a.mutations = detect_mutations(a.rates, options.threshold, entropies);
  a.born_inner_fit = fit_inner_trend(a.deltas, Side::Birth);
  a.dead_inner_fit = fit_inner_trend(a.deltas, Side::Death);
  return a;
}

// ---------------------------------------------------------------- reports

std::string format_real(std::optional<double> v) {
  if (!v || std::isnan(*v)) return "nan";
  return fmt::format("{:.17g}", *v);
}

std::string deltas_csv(std::span<const EvolutionDelta> deltas) {
  std::string out =
      "from,to,n_steady,n_born,n_dead,e_dead_outer,e_dead_boundary,e_dead_inner,e_born_outer,e_born_boundary,"
      "e_born_inner\n";
  for (const auto& d : deltas) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", d.from_index, d.to_index, d.steady_nodes.size(),
                       d.born_nodes.size(), d.dead_nodes.size(), d.dead_outer.size(), d.dead_boundary.size(),
                       d.dead_inner.size(), d.born_outer.size(), d.born_boundary.size(), d.born_inner.size());
  }
  return out;
}

std::string census_csv(std::span<const CensusTable> tables, std::span<const MotifCounts> static_counts) {
  std::string out = "from,to";
  for (Side side : {Side::Birth, Side::Death}) {
    for (EdgeClass cls : {EdgeClass::Inner, EdgeClass::Boundary, EdgeClass::Outer}) {
      for (const char* m : {"m1", "m2", "m3"}) out += fmt::format(",{}_{}_{}", to_string(side), to_string(cls), m);
    }
  }
  out += ",static_m3_from,static_m3_to\n";
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto& t = tables[i];
    out += fmt::format("{},{}", t.from_index, t.to_index);
    for (Side side : {Side::Birth, Side::Death}) {
      for (EdgeClass cls : {EdgeClass::Inner, EdgeClass::Boundary, EdgeClass::Outer}) {
        const auto& c = t.at(side, cls);
        out += fmt::format(",{},{},{}", c.m1, c.m2, c.m3);
      }
    }
    out += fmt::format(",{},{}\n", static_counts[i].m3, static_counts[i + 1].m3);
  }
  return out;
}

std::string metrics_csv(const MetricsSeries& m) {
  std::string out =
      "from,to,timestamp_from,timestamp_to,nodes_from,edges_from,nodes_to,edges_to,gamma_from,gamma_to,"
      "gamma_loglog_from,gamma_loglog_to,entropy_from,entropy_to,e_born_inner,e_born_boundary,e_born_outer,"
      "e_dead_inner,e_dead_boundary,e_dead_outer,r_term,r,m3_birth_rate,m3_death_rate\n";
  auto gamma = [](const SnapshotMetrics& s) {
    return s.powerlaw ? std::optional<double>(s.powerlaw->gamma) : std::nullopt;
  };
  auto gamma_ll = [](const SnapshotMetrics& s) {
    return s.powerlaw ? std::optional<double>(s.powerlaw->gamma_loglog) : std::nullopt;
  };
  for (std::size_t i = 0; i < m.pairs.size(); ++i) {
    const auto& p = m.pairs[i];
    const auto& a = m.snapshots[i];
    const auto& b = m.snapshots[i + 1];
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", p.from_index,
                       p.to_index, a.timestamp.str(), b.timestamp.str(), a.nodes, a.edges, b.nodes, b.edges,
                       format_real(gamma(a)), format_real(gamma(b)), format_real(gamma_ll(a)),
                       format_real(gamma_ll(b)), format_real(a.entropy), format_real(b.entropy), p.born[0],
                       p.born[1], p.born[2], p.dead[0], p.dead[1], p.dead[2], format_real(p.r_term),
                       format_real(m.r), format_real(p.m3.birth_rate), format_real(p.m3.death_rate));
  }
  return out;
}

nlohmann::ordered_json mutations_json(std::span<const MutationEvent> events) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : events) {
    nlohmann::ordered_json o;
    o["pair_from"] = e.pair_from;
    o["pair_to"] = e.pair_to;
    o["side"] = to_string(e.side);
    o["rate"] = e.rate;
    o["threshold"] = e.threshold;
    o["entropy_before"] = real_or_null(e.entropy_before);
    o["entropy_after"] = real_or_null(e.entropy_after);
    arr.push_back(std::move(o));
  }
  return arr;
}

namespace {

nlohmann::ordered_json fit_json(const FitOutcome& f) {
  nlohmann::ordered_json o;
  o["status"] = f.status;
  if (f.fit) {
    o["a"] = f.fit->a;
    o["b"] = f.fit->b;
    o["c"] = f.fit->c;
    o["sse"] = f.fit->sse;
    o["x_min"] = f.fit->x_min;
    o["x_max"] = f.fit->x_max;
    o["n_points"] = f.fit->n_points;
  }
  o["x_domain"] = "pair_index";
  return o;
}

}  // namespace

nlohmann::ordered_json fits_json(const Analysis& a) {
  nlohmann::ordered_json j;
  j["born_inner"] = fit_json(a.born_inner_fit);
  j["dead_inner"] = fit_json(a.dead_inner_fit);
  j["metabolism"] = {{"scope", to_string(a.metrics.scope)}, {"r", real_or_null(a.metrics.r)}};
  return j;
}

Bundle report_bundle(const Analysis& a) {
  return {
      {"deltas.csv", deltas_csv(a.deltas)},
      {"census.csv", census_csv(a.tables, a.static_counts)},
      {"metrics.csv", metrics_csv(a.metrics)},
      {"mutations.json", mutations_json(a.mutations).dump(2) + "\n"},
      {"fits.json", fits_json(a).dump(2) + "\n"},
  };
}

void write_bundle(const Bundle& bundle, const fs::path& dir) {
  std::vector<fs::path> written;
  try {
    fs::create_directories(dir);
    for (const auto& [name, contents] : bundle) {
      fs::path target = dir / name;
      written.push_back(target);
      write_file(target, contents);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

// SOURCE_DATE_EPOCH pins the timestamp for reproducible bundles.
std::string created_at() {
  std::time_t when = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) when = static_cast<std::time_t>(v);
  }
  std::tm utc{};
  gmtime_r(&when, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return stamp;
}

}  // namespace

void run_pipeline(const fs::path& manifest_file, const PipelineOptions& options, const fs::path& out_dir) {
  SeriesManifest manifest = SeriesManifest::load(manifest_file);
  SnapshotSeries series = manifest.load_series();
  Analysis analysis = analyze(series, options);
  Bundle bundle = report_bundle(analysis);

  nlohmann::ordered_json meta;
  meta["tool"] = "netmeta";
  meta["version"] = kToolVersion;
  meta["created_at"] = created_at();
  meta["options"] = {{"scope", to_string(options.scope)},
                     {"threshold", options.threshold},
                     {"window", "month"},
                     {"threads", options.threads}};
  meta["manifest"] = {{"path", manifest_file.generic_string()}, {"sha256", sha256_hex(read_file(manifest_file))}};
  auto inputs = nlohmann::ordered_json::array();
  for (const auto& e : manifest.entries()) {
    inputs.push_back({{"index", e.index},
                      {"timestamp", e.timestamp.str()},
                      {"path", e.path.generic_string()},
                      {"sha256", sha256_hex(read_file(manifest.resolve(e)))}});
  }
  meta["inputs"] = std::move(inputs);
  bundle.emplace_back("run-metadata.json", meta.dump(2) + "\n");

  write_bundle(bundle, out_dir);
}

}  // namespace netmeta
