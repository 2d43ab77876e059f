#pragma once

// Seeded synthetic temporal networks with planted node churn, inner-edge
// rewiring and triangle closures/breaks, plus the ground truth to replay.
//
// Randomness is std::mt19937_64 (its output sequence is fixed by the C++
// standard) fed through uniform_below(); no std:: distributions are used, so
// a given seed yields the same series on every conforming toolchain.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "netmeta/graph.hpp"

namespace netmeta {

enum class Attachment { Uniform, Preferential };

// How closures and breaks are planted among steady nodes.
//   Wedge:    a closure adds the missing edge of an open wedge; a break
//             removes one edge of a triangle.
//   AllEdges: a closure adds all three edges on a node-disjoint triple with
//             no edges among it; a break removes all three edges of a
//             node-disjoint triangle.
enum class MotifMode { Wedge, AllEdges };

struct SynthConfig {
  std::uint64_t seed{42};
  std::size_t n0{100};
  std::size_t steps{12};
  double node_birth_rate{0.05};
  double node_death_rate{0.03};
  std::size_t inner_rewire_per_step{5};
  std::size_t triangle_close_per_step{3};
  std::size_t triangle_break_per_step{2};
  Attachment attachment{Attachment::Preferential};
  MotifMode motif_mode{MotifMode::Wedge};
  YearMonth start{1998, 1};

  // Throws InvalidConfig.
  void validate() const;

  static SynthConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

struct StepTruth {
  int from_index{0};
  int to_index{0};
  std::vector<NodeId> born_nodes;
  std::vector<NodeId> dead_nodes;
  std::vector<Edge> born_inner, born_boundary, born_outer;
  std::vector<Edge> dead_inner, dead_boundary, dead_outer;
  std::vector<std::array<NodeId, 3>> closures;
  std::vector<std::array<NodeId, 3>> breaks;
  std::size_t rewire_shortfall{0};
  std::size_t closure_shortfall{0};
  std::size_t break_shortfall{0};
};

struct SynthTruth {
  std::vector<StepTruth> steps;

  nlohmann::ordered_json to_json() const;
};

struct SynthResult {
  SnapshotSeries series;
  SynthTruth truth;
};

class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, n) by rejection; n > 0.
  std::uint64_t uniform_below(std::uint64_t n);
  // Uniform on [0, 1) with 53 random bits.
  double unit();

 private:
  std::mt19937_64 engine_;
};

SynthResult generate(const SynthConfig& config);

}  // namespace netmeta
