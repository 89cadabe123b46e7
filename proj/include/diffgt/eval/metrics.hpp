#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "diffgt/graph/bundle.hpp"
#include "diffgt/numerics/matrix.hpp"
#include "diffgt/training/checkpoint.hpp"

namespace diffgt {

/// |top-k ∩ relevant| / |relevant|. `relevant` must be non-empty.
double recall_at_k(std::span<const std::size_t> ranked, std::span<const std::size_t> relevant, std::size_t k);

/// DCG with gain 1/log₂(rank+1) over the top k, divided by the ideal DCG of
/// min(|relevant|, k) front-loaded hits. `relevant` must be non-empty.
double ndcg_at_k(std::span<const std::size_t> ranked, std::span<const std::size_t> relevant, std::size_t k);

struct MetricSummary {
  std::vector<double> per_draw;
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation across draws
};

struct MetricReport {
  std::size_t k = 20;
  MetricSummary recall;
  MetricSummary ndcg;
  std::vector<std::size_t> users_per_draw;  ///< users with ≥1 test item
};

MetricSummary summarize(std::vector<double> per_draw);

/// Ranks the full catalogue for every user, masks training items and averages
/// the metrics over users with test items, per draw and then across draws.
MetricReport evaluate_embeddings(const Matrix& embeddings, const DatasetBundle& bundle, std::size_t k = 20);

/// Throws IntegrityError when the checkpoint was trained on a different
/// dataset bundle.
MetricReport evaluate(const ModelState& state, const DatasetBundle& bundle, std::size_t k = 20);

/// Per-draw rows `draw,seed,users,recall@k,ndcg@k` followed by `mean` and
/// `std` rows.
std::string report_to_csv(const MetricReport& report, const DataSplit& split);
/// Aligned plain-text table of the same content.
std::string report_to_table(const MetricReport& report);

}  // namespace diffgt
