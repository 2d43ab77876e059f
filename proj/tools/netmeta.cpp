// netmeta: temporal network evolution toolkit.
//
//   netmeta ingest     edge lists or AS_PATH dumps -> monthly snapshot series
//   netmeta classify   deltas.csv
//   netmeta census     census.csv
//   netmeta metrics    metrics.csv, mutations.json, fits.json
//   netmeta mutations  mutations.json
//   netmeta trajectory per-snapshot degree of one node (stdout)
//   netmeta ego        labeled ego-network edges for one pair (stdout)
//   netmeta synth      seeded synthetic series + truth.json
//   netmeta run        the whole pipeline plus run-metadata.json
//
// Exit status: 0 on success, 2 on any error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "netmeta/error.hpp"
#include "netmeta/evolution.hpp"
#include "netmeta/ingest.hpp"
#include "netmeta/metrics.hpp"
#include "netmeta/parallel.hpp"
#include "netmeta/pipeline.hpp"
#include "netmeta/synth.hpp"

namespace fs = std::filesystem;
using namespace netmeta;

namespace {

constexpr int kExitError = 2;

struct SeriesArgs {
  std::string manifest;
  std::string out{"."};
};

struct AnalysisArgs {
  std::string scope{"all"};
  double threshold{0.03};
};

void add_series(CLI::App* cmd, SeriesArgs& a, bool with_out = true) {
  cmd->add_option("--series", a.manifest, "manifest.json of the snapshot series")->required();
  if (with_out) cmd->add_option("--out", a.out, "output directory")->capture_default_str();
}

void add_analysis(CLI::App* cmd, AnalysisArgs& a) {
  cmd->add_option("--scope", a.scope, "edge classes in the metabolism rate: all|inner|boundary|outer")
      ->capture_default_str();
  cmd->add_option("--threshold", a.threshold,
                  "M3 mutation threshold; a rate must be strictly greater to fire (exactly 0.03 does not)")
      ->capture_default_str();
}

PipelineOptions options_from(const AnalysisArgs& a) {
  PipelineOptions o;
  o.scope = parse_scope(a.scope);
  o.threshold = a.threshold;
  o.threads = configured_threads();
  return o;
}

SnapshotSeries load(const SeriesArgs& a) { return SeriesManifest::load(a.manifest).load_series(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open {}", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Snapshot& by_index(const SnapshotSeries& s, int index) {
  for (const auto& g : s.snapshots()) {
    if (g.index() == index) return g;
  }
  throw Error(ErrorCode::InvalidSeries, fmt::format("no snapshot with index {}", index));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netmeta - birth/death, motif and mutation analysis of snapshot series"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "build a monthly snapshot series from input files");
  std::string format = "edgelist", profile = "path-per-line", window = "month", ingest_out, reserved_spec;
  std::vector<std::string> files;
  ingest->add_option("--format", format, "edgelist|aspath")->capture_default_str();
  ingest->add_option("--profile", profile, "AS_PATH profile: show-ip-bgp | path-per-line | regex:<pattern>")
      ->capture_default_str();
  ingest->add_option("--window", window, "aggregation window (month)")->capture_default_str();
  ingest->add_option("--reserved", reserved_spec, "override reserved AS ranges, e.g. 0,64512-65534");
  ingest->add_option("--out", ingest_out, "output directory")->required();
  ingest->add_option("files", files, "input files")->required();

  SeriesArgs classify_args, census_args, metrics_args, mutations_args, run_args, traj_args, ego_args;
  AnalysisArgs metrics_opts, mutations_opts, run_opts;

  auto* classify = app.add_subcommand("classify", "write deltas.csv");
  add_series(classify, classify_args);
  auto* census = app.add_subcommand("census", "write census.csv");
  add_series(census, census_args);
  auto* metrics = app.add_subcommand("metrics", "write metrics.csv, mutations.json and fits.json");
  add_series(metrics, metrics_args);
  add_analysis(metrics, metrics_opts);
  auto* mutations = app.add_subcommand("mutations", "write mutations.json");
  add_series(mutations, mutations_args);
  add_analysis(mutations, mutations_opts);

  auto* trajectory = app.add_subcommand("trajectory", "print a node's degree in every snapshot");
  std::uint64_t traj_node = 0;
  add_series(trajectory, traj_args, false);
  trajectory->add_option("--node", traj_node, "node id")->required();

  auto* ego = app.add_subcommand("ego", "print the labeled ego network of a node across a pair");
  std::uint64_t ego_node = 0;
  int ego_from = 0, ego_to = 0;
  add_series(ego, ego_args, false);
  ego->add_option("--node", ego_node, "focal node id")->required();
  ego->add_option("--from", ego_from, "earlier snapshot index")->required();
  ego->add_option("--to", ego_to, "later snapshot index")->required();

  auto* synth = app.add_subcommand("synth", "generate a synthetic series with planted truth");
  std::string synth_config, synth_out;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--seed", synth_seed, "overrides the config seed");
  synth->add_option("--config", synth_config, "JSON SynthConfig (defaults when omitted)");
  synth->add_option("--out", synth_out, "output directory")->required();

  auto* run = app.add_subcommand("run", "full pipeline: classify, census, metrics, mutations");
  add_series(run, run_args);
  add_analysis(run, run_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (ingest->parsed()) {
      if (window != "month") throw Error(ErrorCode::InvalidConfig, "only --window month is supported");
      IngestOptions opts;
      if (format == "edgelist") {
        opts.format = InputFormat::EdgeList;
      } else if (format == "aspath") {
        opts.format = InputFormat::AsPath;
      } else {
        throw Error(ErrorCode::InvalidConfig, fmt::format("unknown format '{}'", format));
      }
      opts.profile = profile;
      if (!reserved_spec.empty()) opts.reserved = ReservedAsSet::parse(reserved_spec);
      std::vector<fs::path> paths(files.begin(), files.end());
      auto result = ingest_files(paths, opts);
      write_series(result.series, ingest_out);
      std::ofstream(fs::path(ingest_out) / "ingest-report.json") << result.report.to_json().dump(2) << "\n";
      for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << "\n";
    } else if (classify->parsed()) {
      auto series = load(classify_args);
      write_bundle({{"deltas.csv", deltas_csv(classify_series(series, configured_threads()))}}, classify_args.out);
    } else if (census->parsed()) {
      auto series = load(census_args);
      unsigned threads = configured_threads();
      auto deltas = classify_series(series, threads);
      write_bundle({{"census.csv", census_csv(census_series(deltas, threads), static_census_series(series, threads))}},
                   census_args.out);
    } else if (metrics->parsed()) {
      auto a = analyze(load(metrics_args), options_from(metrics_opts));
      write_bundle({{"metrics.csv", metrics_csv(a.metrics)},
                    {"mutations.json", mutations_json(a.mutations).dump(2) + "\n"},
                    {"fits.json", fits_json(a).dump(2) + "\n"}},
                   metrics_args.out);
    } else if (mutations->parsed()) {
      auto a = analyze(load(mutations_args), options_from(mutations_opts));
      write_bundle({{"mutations.json", mutations_json(a.mutations).dump(2) + "\n"}}, mutations_args.out);
    } else if (trajectory->parsed()) {
      auto t = node_trajectory(load(traj_args), NodeId{traj_node});
      std::cout << "# node " << traj_node << "\n# first_seen " << t.first_seen << "\n# last_seen " << t.last_seen
                << "\nindex,timestamp,present,degree\n";
      for (const auto& p : t.points) {
        std::cout << p.index << ',' << p.timestamp.str() << ',' << (p.degree ? 1 : 0) << ','
                  << (p.degree ? std::to_string(*p.degree) : std::string("nan")) << '\n';
      }
    } else if (ego->parsed()) {
      auto series = load(ego_args);
      auto e = ego_delta(by_index(series, ego_from), by_index(series, ego_to), NodeId{ego_node});
      for (const auto& le : e.edges) {
        std::cout << le.edge.lo.value << ' ' << le.edge.hi.value << ' ' << to_string(le.state) << '\n';
      }
    } else if (synth->parsed()) {
      SynthConfig cfg;
      if (!synth_config.empty()) {
        try {
          cfg = SynthConfig::from_json(nlohmann::json::parse(slurp(synth_config)));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::InvalidConfig, fmt::format("{}: {}", synth_config, e.what()));
        }
      }
      if (synth_seed) cfg.seed = *synth_seed;
      auto result = generate(cfg);
      write_series(result.series, synth_out);
      std::ofstream(fs::path(synth_out) / "truth.json") << result.truth.to_json().dump(2) << "\n";
    } else if (run->parsed()) {
      run_pipeline(run_args.manifest, options_from(run_opts), run_args.out);
    }
  } catch (const Error& e) {
    std::cerr << "netmeta: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "netmeta: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
