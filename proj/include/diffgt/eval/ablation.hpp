#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "diffgt/eval/metrics.hpp"
#include "diffgt/graph/dataset.hpp"
#include "diffgt/training/config.hpp"

namespace diffgt {

struct AblationRun {
  std::uint64_t seed = 0;
  MetricReport base;
  MetricReport variant;
};

struct AblationReport {
  std::string variant;
  std::vector<AblationRun> runs;
  MetricSummary base_recall;
  MetricSummary variant_recall;
  MetricSummary base_ndcg;
  MetricSummary variant_ndcg;
  /// Per-seed base − variant Recall@k and how many of those are positive.
  MetricSummary recall_difference;
  std::size_t base_wins = 0;
};

/// "base" names the unmodified config (an identity ablation).
TrainConfig variant_config(const TrainConfig& base, const std::string& variant);

/// For every seed: split the dataset with that seed, train the base config and
/// each variant on it (same seed, same split) and evaluate at k. The base is
/// trained once per seed and shared by all variants. `progress` receives a
/// line per finished training run.
std::vector<AblationReport> ablate(const Dataset& dataset, const TrainConfig& base,
                                   const std::vector<std::string>& variants, std::span<const std::uint64_t> seeds,
                                   std::size_t k = 20,
                                   const std::function<void(const std::string&)>& progress = {});

/// One row per (variant, seed) plus mean/std rows.
std::string ablation_to_csv(const std::vector<AblationReport>& reports);
std::string ablation_to_table(const std::vector<AblationReport>& reports);

}  // namespace diffgt
