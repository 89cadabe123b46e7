#include "diffgt/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "diffgt/error.hpp"
#include "diffgt/model/score.hpp"
#include "diffgt/training/trainer.hpp"

namespace diffgt {
namespace {

bool is_relevant(std::span<const std::size_t> relevant, std::size_t item) {
  return std::find(relevant.begin(), relevant.end(), item) != relevant.end();
}

void require_relevant(std::span<const std::size_t> relevant, std::size_t k) {
  if (relevant.empty()) throw ConfigError("metrics need at least one relevant item");
  if (k == 0) throw ConfigError("metric cutoff k must be >= 1");
}

}  // namespace

double recall_at_k(std::span<const std::size_t> ranked, std::span<const std::size_t> relevant, std::size_t k) {
  require_relevant(relevant, k);
  const std::size_t depth = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < depth; ++r) hits += is_relevant(relevant, ranked[r]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double ndcg_at_k(std::span<const std::size_t> ranked, std::span<const std::size_t> relevant, std::size_t k) {
  require_relevant(relevant, k);
  const std::size_t depth = std::min(k, ranked.size());
  double dcg = 0.0;
  for (std::size_t r = 0; r < depth; ++r) {
    if (is_relevant(relevant, ranked[r])) dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  double ideal = 0.0;
  for (std::size_t r = 0; r < std::min(k, relevant.size()); ++r) ideal += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / ideal;
}

MetricSummary summarize(std::vector<double> per_draw) {
  MetricSummary s;
  s.per_draw = std::move(per_draw);
  if (s.per_draw.empty()) return s;
  const double n = static_cast<double>(s.per_draw.size());
  s.mean = std::accumulate(s.per_draw.begin(), s.per_draw.end(), 0.0) / n;
  if (s.per_draw.size() > 1) {
    double sq = 0.0;
    for (double v : s.per_draw) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / (n - 1.0));
  }
  return s;
}

MetricReport evaluate_embeddings(const Matrix& embeddings, const DatasetBundle& bundle, std::size_t k) {
  if (k == 0) throw ConfigError("metric cutoff k must be >= 1");
  const auto& g = bundle.dataset.graph;
  const std::size_t nu = g.num_users();
  if (embeddings.rows() != g.num_nodes()) {
    throw ShapeError("evaluate: embeddings have " + std::to_string(embeddings.rows()) + " rows, graph has " +
                     std::to_string(g.num_nodes()) + " nodes");
  }
  std::vector<std::size_t> all_users(nu);
  std::iota(all_users.begin(), all_users.end(), std::size_t{0});
  Matrix scores = score(all_users, embeddings, nu);
  mask_items(scores, all_users, items_by_user(nu, bundle.split.train));

  std::vector<std::vector<std::size_t>> ranked(nu);
  for (std::size_t u = 0; u < nu; ++u) ranked[u] = top_k(scores.row(u), k);

  MetricReport report;
  report.k = k;
  std::vector<double> recalls;
  std::vector<double> ndcgs;
  for (const auto& draw : bundle.split.draws) {
    const auto relevant = items_by_user(nu, draw.test);
    double recall = 0.0;
    double ndcg = 0.0;
    std::size_t users = 0;
    for (std::size_t u = 0; u < nu; ++u) {
      if (relevant[u].empty()) continue;
      recall += recall_at_k(ranked[u], relevant[u], k);
      ndcg += ndcg_at_k(ranked[u], relevant[u], k);
      ++users;
    }
    const double denom = static_cast<double>(std::max<std::size_t>(users, 1));
    recalls.push_back(recall / denom);
    ndcgs.push_back(ndcg / denom);
    report.users_per_draw.push_back(users);
  }
  report.recall = summarize(std::move(recalls));
  report.ndcg = summarize(std::move(ndcgs));
  return report;
}

MetricReport evaluate(const ModelState& state, const DatasetBundle& bundle, std::size_t k) {
  const std::string hash = dataset_hash(bundle);
  if (state.dataset_hash != hash) {
    throw IntegrityError("checkpoint was trained on dataset " + state.dataset_hash + " but the bundle hashes to " +
                         hash);
  }
  const ModelContext ctx = make_context(bundle, state.config);
  return evaluate_embeddings(final_embeddings(state.params, state.config, ctx), bundle, k);
}

std::string report_to_csv(const MetricReport& report, const DataSplit& split) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "draw,seed,users,recall@" << report.k << ",ndcg@" << report.k << '\n';
  for (std::size_t d = 0; d < report.recall.per_draw.size(); ++d) {
    out << d << ',' << split.draws[d].seed << ',' << report.users_per_draw[d] << ',' << report.recall.per_draw[d]
        << ',' << report.ndcg.per_draw[d] << '\n';
  }
  out << "mean,,," << report.recall.mean << ',' << report.ndcg.mean << '\n';
  out << "std,,," << report.recall.stddev << ',' << report.ndcg.stddev << '\n';
  return out.str();
}

std::string report_to_table(const MetricReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(8) << "draw" << std::setw(10) << "users" << std::setw(14)
      << ("Recall@" + std::to_string(report.k)) << ("NDCG@" + std::to_string(report.k)) << '\n';
  for (std::size_t d = 0; d < report.recall.per_draw.size(); ++d) {
    out << std::setw(8) << d << std::setw(10) << report.users_per_draw[d] << std::setw(14) << report.recall.per_draw[d]
        << report.ndcg.per_draw[d] << '\n';
  }
  out << std::setw(18) << "mean ± std" << report.recall.mean << " ± " << report.recall.stddev << "   "
      << report.ndcg.mean << " ± " << report.ndcg.stddev << '\n';
  return out.str();
}

}  // namespace diffgt
