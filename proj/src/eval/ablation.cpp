#include "diffgt/eval/ablation.hpp"

#include <iomanip>
#include <sstream>

#include "diffgt/graph/split.hpp"
#include "diffgt/training/trainer.hpp"

namespace diffgt {

TrainConfig variant_config(const TrainConfig& base, const std::string& variant) {
  if (variant == "base") return base;
  return apply_ablation(base, variant);
}

std::vector<AblationReport> ablate(const Dataset& dataset, const TrainConfig& base,
                                   const std::vector<std::string>& variants, std::span<const std::uint64_t> seeds,
                                   std::size_t k, const std::function<void(const std::string&)>& progress) {
  std::vector<TrainConfig> configs;
  for (const auto& v : variants) configs.push_back(variant_config(base, v));

  std::vector<AblationReport> reports(variants.size());
  for (std::size_t v = 0; v < variants.size(); ++v) reports[v].variant = variants[v];

  for (const std::uint64_t seed : seeds) {
    const DatasetBundle bundle{dataset, split(dataset.graph, seed)};
    const auto run = [&](TrainConfig c, const std::string& label) {
      c.seed = seed;
      const TrainResult result = train(bundle, c);
      MetricReport report = evaluate(result.state, bundle, k);
      if (progress) {
        std::ostringstream line;
        line << label << " seed=" << seed << " epochs=" << result.log.size() << " best=" << result.state.best_epoch
             << " recall@" << k << '=' << report.recall.mean;
        progress(line.str());
      }
      return report;
    };
    const MetricReport base_report = run(base, "base");
    for (std::size_t v = 0; v < variants.size(); ++v) {
      MetricReport variant_report = variants[v] == "base" ? base_report : run(configs[v], variants[v]);
      reports[v].runs.push_back({seed, base_report, std::move(variant_report)});
    }
  }

  for (auto& r : reports) {
    std::vector<double> br, vr, bn, vn, diff;
    for (const auto& run : r.runs) {
      br.push_back(run.base.recall.mean);
      vr.push_back(run.variant.recall.mean);
      bn.push_back(run.base.ndcg.mean);
      vn.push_back(run.variant.ndcg.mean);
      diff.push_back(run.base.recall.mean - run.variant.recall.mean);
      if (diff.back() > 0) ++r.base_wins;
    }
    r.base_recall = summarize(br);
    r.variant_recall = summarize(vr);
    r.base_ndcg = summarize(bn);
    r.variant_ndcg = summarize(vn);
    r.recall_difference = summarize(diff);
  }
  return reports;
}

std::string ablation_to_csv(const std::vector<AblationReport>& reports) {
  std::ostringstream out;
  out << std::setprecision(17) << "variant,seed,base_recall,variant_recall,base_ndcg,variant_ndcg,recall_difference\n";
  for (const auto& r : reports) {
    for (const auto& run : r.runs) {
      out << r.variant << ',' << run.seed << ',' << run.base.recall.mean << ',' << run.variant.recall.mean << ','
          << run.base.ndcg.mean << ',' << run.variant.ndcg.mean << ','
          << run.base.recall.mean - run.variant.recall.mean << '\n';
    }
    out << r.variant << ",mean," << r.base_recall.mean << ',' << r.variant_recall.mean << ',' << r.base_ndcg.mean << ','
        << r.variant_ndcg.mean << ',' << r.recall_difference.mean << '\n';
    out << r.variant << ",std," << r.base_recall.stddev << ',' << r.variant_recall.stddev << ',' << r.base_ndcg.stddev
        << ',' << r.variant_ndcg.stddev << ',' << r.recall_difference.stddev << '\n';
  }
  return out.str();
}

std::string ablation_to_table(const std::vector<AblationReport>& reports) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "variant" << std::setw(22) << "base recall" << std::setw(22) << "variant recall"
      << std::setw(12) << "base wins" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& r : reports) {
    std::ostringstream b, v;
    b << std::fixed << std::setprecision(4) << r.base_recall.mean << " ± " << r.base_recall.stddev;
    v << std::fixed << std::setprecision(4) << r.variant_recall.mean << " ± " << r.variant_recall.stddev;
    out << std::setw(14) << r.variant << std::setw(24) << b.str() << std::setw(24) << v.str() << r.base_wins << '/'
        << r.runs.size() << '\n';
  }
  return out.str();
}

}  // namespace diffgt
