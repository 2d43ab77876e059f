#include "netmeta/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "netmeta/error.hpp"

namespace netmeta {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// asplain "65550" or asdot "1.14".
std::optional<std::uint64_t> parse_asn(std::string_view s) {
  auto dot = s.find('.');
  if (dot == std::string_view::npos) {
    auto v = parse_u64(s);
    if (!v || *v > 0xFFFFFFFFull) return std::nullopt;
    return v;
  }
  auto hi = parse_u64(s.substr(0, dot));
  auto lo = parse_u64(s.substr(dot + 1));
  if (!hi || !lo || *hi > 0xFFFF || *lo > 0xFFFF) return std::nullopt;
  return (*hi << 16) | *lo;
}

bool is_origin_code(std::string_view tok) { return tok == "i" || tok == "e" || tok == "?"; }

std::string read_all(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, fmt::format("cannot open {}", file.string()));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

EdgeListFragment parse_edgelist(std::istream& in) {
  EdgeListFragment frag;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto toks = split_ws(body);
    if (toks.front() == "%iso") {
      auto id = toks.size() == 2 ? parse_u64(toks[1]) : std::nullopt;
      if (!id) {
        throw Error(ErrorCode::ParseError, fmt::format("line {}: expected '%iso <id>'", lineno));
      }
      frag.isolates.push_back(NodeId{*id});
      continue;
    }
    if (toks.size() != 2) {
      throw Error(ErrorCode::ParseError,
                  fmt::format("line {}: expected 2 fields, found {}", lineno, toks.size()));
    }
    auto a = parse_u64(toks[0]);
    auto b = parse_u64(toks[1]);
    if (!a || !b) {
      throw Error(ErrorCode::ParseError, fmt::format("line {}: non-integer node id", lineno));
    }
    NodeId u{*a}, v{*b};
    frag.pairs.emplace_back(std::min(u, v), std::max(u, v));
  }
  return frag;
}

EdgeListFragment parse_edgelist(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edgelist(in);
}

std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::Loop: return "Loop";
    case Rejection::Reserved: return "Reserved";
    case Rejection::Empty: return "Empty";
  }
  return "Unknown";
}

ReservedAsSet::ReservedAsSet(std::vector<Range> ranges) : ranges_(std::move(ranges)) {
  std::sort(ranges_.begin(), ranges_.end(), [](const Range& a, const Range& b) { return a.first < b.first; });
}

const ReservedAsSet& ReservedAsSet::defaults() {
  static const ReservedAsSet set({{0, 0},
                                  {23456, 23456},
                                  {64496, 64511},
                                  {64512, 65534},
                                  {65535, 65535},
                                  {65536, 65551},
                                  {4200000000ull, 4294967295ull}});
  return set;
}

ReservedAsSet ReservedAsSet::parse(std::string_view text) {
  std::vector<Range> ranges;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    std::string_view item = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (!item.empty()) {
      auto dash = item.find('-');
      auto first = parse_u64(trim(item.substr(0, dash)));
      auto last = dash == std::string_view::npos ? first : parse_u64(trim(item.substr(dash + 1)));
      if (!first || !last || *last < *first) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("bad reserved AS range '{}'", item));
      }
      ranges.push_back({*first, *last});
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return ReservedAsSet(std::move(ranges));
}

bool ReservedAsSet::contains(std::uint64_t asn) const {
  return std::any_of(ranges_.begin(), ranges_.end(),
                     [asn](const Range& r) { return asn >= r.first && asn <= r.last; });
}

SanitizeResult sanitize_aspath(std::span<const std::string> tokens, const ReservedAsSet& reserved) {
  SanitizeResult result;
  std::vector<NodeId> hops;
  bool in_set = false;
  bool truncated = false;
  for (const std::string& raw : tokens) {
    std::string_view tok = raw;
    bool opens = !tok.empty() && tok.front() == '{';
    bool closes = !tok.empty() && tok.back() == '}';
    auto inner_braces = tok.substr(opens ? 1 : 0);
    if (closes && !inner_braces.empty()) inner_braces.remove_suffix(1);
    if (inner_braces.find_first_of("{}") != std::string_view::npos) {
      throw Error(ErrorCode::ParseError, fmt::format("malformed AS-SET token '{}'", tok));
    }
    if (opens) {
      if (in_set) throw Error(ErrorCode::ParseError, "nested AS-SET");
      in_set = true;
      ++result.asset_segments_dropped;
      truncated = true;
    }
    if (closes) {
      if (!in_set) throw Error(ErrorCode::ParseError, fmt::format("unmatched '}}' in '{}'", tok));
      in_set = false;
      continue;
    }
    if (in_set || truncated) continue;
    auto asn = parse_asn(tok);
    if (!asn) {
      throw Error(ErrorCode::ParseError, fmt::format("'{}' is not an AS number", tok));
    }
    hops.push_back(NodeId{*asn});
  }
  if (in_set) throw Error(ErrorCode::ParseError, "unterminated AS-SET");

  if (hops.empty()) {
    result.rejection = Rejection::Empty;
    return result;
  }
  if (std::any_of(hops.begin(), hops.end(), [&](NodeId h) { return reserved.contains(h.value); })) {
    result.rejection = Rejection::Reserved;
    return result;
  }
  hops.erase(std::unique(hops.begin(), hops.end()), hops.end());
  std::vector<NodeId> sorted = hops;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    result.rejection = Rejection::Loop;
    return result;
  }
  result.path = AsPath{std::move(hops)};
  return result;
}

std::vector<NodePair> paths_to_edges(std::span<const AsPath> paths) {
  std::vector<NodePair> out;
  for (const auto& p : paths) {
    for (std::size_t j = 0; j + 1 < p.hops.size(); ++j) {
      NodeId a = p.hops[j], b = p.hops[j + 1];
      out.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  return out;
}

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  Date d;
  auto num = [](std::string_view s) { return parse_u64(s); };
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    auto y = num(text.substr(0, 4)), m = num(text.substr(5, 2)), dd = num(text.substr(8, 2));
    if (!y || !m || !dd) return std::nullopt;
    d = {int(*y), int(*m), int(*dd)};
  } else if (text.size() == 8) {
    auto y = num(text.substr(0, 4)), m = num(text.substr(4, 2)), dd = num(text.substr(6, 2));
    if (!y || !m || !dd) return std::nullopt;
    d = {int(*y), int(*m), int(*dd)};
  } else if (text.size() == 6) {
    auto y = num(text.substr(0, 4)), m = num(text.substr(4, 2));
    if (!y || !m) return std::nullopt;
    d = {int(*y), int(*m), 1};
  } else {
    return std::nullopt;
  }
  if (!YearMonth::valid(d.year, d.month) || d.day < 1 || d.day > 31) return std::nullopt;
  return d;
}

AggregateResult aggregate_window(std::vector<DatedFragment> fragments) {
  std::map<YearMonth, std::pair<std::vector<NodePair>, std::vector<NodeId>>> months;
  for (auto& f : fragments) {
    auto& [pairs, isolates] = months[f.date.year_month()];
    pairs.insert(pairs.end(), f.pairs.begin(), f.pairs.end());
    isolates.insert(isolates.end(), f.isolates.begin(), f.isolates.end());
  }

  AggregateResult result;
  std::vector<Snapshot> snapshots;
  int index = 1;
  std::optional<YearMonth> prev;
  for (const auto& [month, data] : months) {
    if (prev) {
      for (YearMonth m = prev->next(); m < month; m = m.next()) {
        result.missing_months.push_back(m);
      }
    }
    snapshots.emplace_back(index++, month, Graph::from_pairs(data.first, data.second));
    prev = month;
  }
  std::optional<int> window;
  if (result.missing_months.empty()) window = 1;
  result.series = SnapshotSeries(std::move(snapshots), window);
  return result;
}

nlohmann::ordered_json IngestReport::to_json() const {
  nlohmann::ordered_json j;
  j["paths_read"] = paths_read;
  j["paths_dropped_loop"] = paths_dropped_loop;
  j["paths_dropped_reserved"] = paths_dropped_reserved;
  j["segments_dropped_asset"] = segments_dropped_asset;
  j["edges_emitted"] = edges_emitted;
  j["warnings"] = warnings;
  return j;
}

AsPathProfile AsPathProfile::named(std::string_view name) {
  AsPathProfile p;
  p.name_ = std::string(name);
  if (name == "show-ip-bgp") {
    p.kind_ = Kind::ShowIpBgp;
  } else if (name == "path-per-line") {
    p.kind_ = Kind::PathPerLine;
  } else if (name.starts_with("regex:")) {
    p.kind_ = Kind::Regex;
    try {
      p.pattern_.emplace(std::string(name.substr(6)));
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::InvalidConfig, fmt::format("bad profile regex: {}", e.what()));
    }
    if (p.pattern_->mark_count() < 1) {
      throw Error(ErrorCode::InvalidConfig, "profile regex needs a capture group for the path");
    }
  } else {
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown profile '{}'", name));
  }
  return p;
}

std::vector<std::vector<std::string>> AsPathProfile::extract(std::istream& in) const {
  std::vector<std::vector<std::string>> paths;
  auto emit = [&](std::string_view text) {
    auto toks = split_ws(text);
    if (!toks.empty() && is_origin_code(toks.back())) toks.pop_back();
    paths.emplace_back(toks.begin(), toks.end());
  };

  std::string line;
  std::optional<std::size_t> path_column;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    switch (kind_) {
      case Kind::PathPerLine: {
        auto body = trim(line);
        if (body.empty() || body.front() == '#') break;
        emit(body);
        break;
      }
      case Kind::ShowIpBgp: {
        if (!path_column) {
          auto net = line.find("Network");
          auto col = line.find("Path");
          if (net != std::string::npos && col != std::string::npos && col > net) path_column = col;
          break;
        }
        // Route lines start with status codes; continuation lines with blanks.
        if (line.empty() || std::string_view("* >sdhr").find(line.front()) == std::string_view::npos) break;
        if (line.size() <= *path_column) break;
        emit(line.substr(*path_column));
        break;
      }
      case Kind::Regex: {
        std::smatch m;
        if (std::regex_search(line, m, *pattern_) && m[1].matched) emit(m[1].str());
        break;
      }
    }
  }
  if (kind_ == Kind::ShowIpBgp && !path_column) {
    throw Error(ErrorCode::ParseError, "show-ip-bgp table header (Network ... Path) not found");
  }
  return paths;
}

std::optional<Date> detect_date(const std::filesystem::path& file, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto body = trim(line);
    if (body.empty()) continue;
    if (body.front() != '#') continue;
    body.remove_prefix(1);
    body = trim(body);
    for (std::string_view key : {std::string_view("date:"), std::string_view("netmeta snapshot")}) {
      if (body.starts_with(key)) {
        if (auto d = parse_date(body.substr(key.size()))) return d;
      }
    }
  }
  // First run of 8 or 6 digits in the file name.
  std::string name = file.filename().string();
  for (std::size_t i = 0; i < name.size();) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < name.size() && std::isdigit(static_cast<unsigned char>(name[j]))) ++j;
    if (j - i == 8 || j - i == 6) {
      if (auto d = parse_date(std::string_view(name).substr(i, j - i))) return d;
    }
    i = j;
  }
  return std::nullopt;
}

IngestResult ingest_files(std::span<const std::filesystem::path> files, const IngestOptions& options) {
  IngestResult result;
  std::optional<AsPathProfile> profile;
  if (options.format == InputFormat::AsPath) profile = AsPathProfile::named(options.profile);

  std::vector<DatedFragment> fragments;
  for (const auto& file : files) {
    std::string text = read_all(file);
    auto date = detect_date(file, text);
    if (!date) {
      throw Error(ErrorCode::ParseError, fmt::format("{}: no date directive or date in file name", file.string()));
    }
    DatedFragment frag{*date, {}, {}};
    try {
      if (options.format == InputFormat::EdgeList) {
        auto parsed = parse_edgelist(text);
        frag.pairs = std::move(parsed.pairs);
        frag.isolates = std::move(parsed.isolates);
      } else {
        std::istringstream in(text);
        std::vector<AsPath> accepted;
        for (const auto& tokens : profile->extract(in)) {
          ++result.report.paths_read;
          auto s = sanitize_aspath(tokens, options.reserved);
          result.report.segments_dropped_asset += s.asset_segments_dropped;
          if (s.accepted()) {
            accepted.push_back(std::move(*s.path));
          } else if (s.rejection == Rejection::Loop) {
            ++result.report.paths_dropped_loop;
          } else if (s.rejection == Rejection::Reserved) {
            ++result.report.paths_dropped_reserved;
          }
        }
        frag.pairs = paths_to_edges(accepted);
      }
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}: {}", file.string(), e.detail()));
    }
    fragments.push_back(std::move(frag));
  }

  auto aggregated = aggregate_window(std::move(fragments));
  for (const auto& m : aggregated.missing_months) {
    result.report.warnings.push_back(fmt::format("MissingMonth({})", m.str()));
  }
  for (const auto& g : aggregated.series.snapshots()) {
    result.report.edges_emitted += g.edges().size();
  }
  result.series = std::move(aggregated.series);
  return result;
}

Snapshot read_snapshot_file(const std::filesystem::path& file, int index, YearMonth timestamp) {
  std::string text = read_all(file);
  try {
    auto frag = parse_edgelist(text);
    return Snapshot(index, timestamp, Graph::from_pairs(frag.pairs, frag.isolates));
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", file.string(), e.detail()));
  }
}

}  // namespace netmeta
