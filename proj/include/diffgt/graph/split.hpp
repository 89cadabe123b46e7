#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "diffgt/graph/interaction_graph.hpp"

namespace diffgt {

/// One held-out draw: the non-training edges of every user divided into
/// validation and test under the draw's own seed.
struct SplitDraw {
  std::uint64_t seed = 0;
  std::vector<Edge> validation;
  std::vector<Edge> test;

  friend bool operator==(const SplitDraw&, const SplitDraw&) = default;
};

/// 7:1:2 split. Training edges are fixed by `seed`; each of the 10 draws
/// (seeds seed..seed+9) re-partitions the remaining 30% into validation and
/// test, so train ∪ validation ∪ test is the full edge set in every draw.
struct DataSplit {
  static constexpr std::size_t kNumDraws = 10;

  std::uint64_t seed = 0;
  std::vector<Edge> train;
  std::vector<SplitDraw> draws;

  /// Validation edges used for early stopping (draw 0).
  const std::vector<Edge>& validation() const { return draws.front().validation; }

  friend bool operator==(const DataSplit&, const DataSplit&) = default;
};

/// Per-user edge counts for a user with n interactions.
struct SplitCounts {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};
SplitCounts split_counts(std::size_t n);

DataSplit split(const InteractionGraph& g, std::uint64_t seed);

}  // namespace diffgt
