#pragma once

// Building snapshot series from edge lists and from text BGP table dumps.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "netmeta/graph.hpp"

namespace netmeta {

struct EdgeListFragment {
  std::vector<NodePair> pairs;  // lo < hi, unsorted, may repeat
  std::vector<NodeId> isolates;
};

// Reads "<u> <v>" lines; '#' comments, blank lines and "%iso <id>" lines are
// accepted. Throws ParseError naming the 1-based line.
EdgeListFragment parse_edgelist(std::istream& in);
EdgeListFragment parse_edgelist(std::string_view text);

struct AsPath {
  std::vector<NodeId> hops;  // collector-near first

  friend bool operator==(const AsPath&, const AsPath&) = default;
};

enum class Rejection { Loop, Reserved, Empty };

std::string_view to_string(Rejection r);

// Reserved/private AS numbers, as inclusive ranges.
class ReservedAsSet {
 public:
  struct Range {
    std::uint64_t first;
    std::uint64_t last;
  };

  ReservedAsSet() = default;
  explicit ReservedAsSet(std::vector<Range> ranges);

  // 0, 23456, 64496-64511, 64512-65534, 65535, 65536-65551,
  // 4200000000-4294967295.
  static const ReservedAsSet& defaults();
  // Comma-separated "a" or "a-b" items.
  static ReservedAsSet parse(std::string_view text);

  bool contains(std::uint64_t asn) const;
  std::span<const Range> ranges() const { return ranges_; }

 private:
  std::vector<Range> ranges_;
};

struct SanitizeResult {
  std::optional<AsPath> path;
  std::optional<Rejection> rejection;
  std::size_t asset_segments_dropped{0};

  bool accepted() const { return path.has_value(); }
};

// Tokens are AS numbers (asplain or asdot) or brace-delimited AS-SET groups,
// which may span several tokens ("{1,2}" or "{1" "2}"). The first AS-SET and
// every hop after it are dropped; prepending is collapsed; a reserved hop or a
// non-adjacent repeat rejects the path. Malformed braces throw ParseError.
SanitizeResult sanitize_aspath(std::span<const std::string> tokens,
                               const ReservedAsSet& reserved = ReservedAsSet::defaults());

// Consecutive hops become links; single-hop paths emit nothing.
std::vector<NodePair> paths_to_edges(std::span<const AsPath> paths);

struct Date {
  int year{0};
  int month{0};
  int day{1};

  YearMonth year_month() const { return {year, month}; }
  friend auto operator<=>(const Date&, const Date&) = default;
};

// Accepts YYYY-MM-DD, YYYYMMDD and YYYYMM (day 1).
std::optional<Date> parse_date(std::string_view text);

struct DatedFragment {
  Date date;
  std::vector<NodePair> pairs;
  std::vector<NodeId> isolates;
};

struct AggregateResult {
  SnapshotSeries series;
  std::vector<YearMonth> missing_months;
};

// Unions fragments per calendar month into snapshots indexed 1..n in month
// order. Months with no data between populated ones are reported, not indexed.
AggregateResult aggregate_window(std::vector<DatedFragment> fragments);

struct IngestReport {
  std::uint64_t paths_read{0};
  std::uint64_t paths_dropped_loop{0};
  std::uint64_t paths_dropped_reserved{0};
  std::uint64_t segments_dropped_asset{0};
  std::uint64_t edges_emitted{0};
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
};

// Locates the AS_PATH token run on each line of a dump.
class AsPathProfile {
 public:
  enum class Kind { ShowIpBgp, PathPerLine, Regex };

  // "show-ip-bgp", "path-per-line", or "regex:<pattern>" (group 1 = path).
  static AsPathProfile named(std::string_view name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  // One token run per route line; trailing origin codes (i, e, ?) removed.
  std::vector<std::vector<std::string>> extract(std::istream& in) const;

 private:
  Kind kind_{Kind::PathPerLine};
  std::string name_;
  std::optional<std::regex> pattern_;
};

enum class InputFormat { EdgeList, AsPath };

struct IngestOptions {
  InputFormat format{InputFormat::EdgeList};
  std::string profile{"path-per-line"};
  ReservedAsSet reserved{ReservedAsSet::defaults()};
};

struct IngestResult {
  SnapshotSeries series;
  IngestReport report;
};

// Date of a dump: a "# date: ..." (or "# netmeta snapshot YYYYMM") line in
// the text, else a YYYYMMDD / YYYYMM run in the file name.
std::optional<Date> detect_date(const std::filesystem::path& file, std::string_view text);

IngestResult ingest_files(std::span<const std::filesystem::path> files, const IngestOptions& options);

// Reads one canonical (or any edge-list) snapshot file.
Snapshot read_snapshot_file(const std::filesystem::path& file, int index, YearMonth timestamp);

}  // namespace netmeta
