// Acceptance harness: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "diffgt/diffusion/forward.hpp"
#include "diffgt/diffusion/reverse.hpp"
#include "diffgt/eval/ablation.hpp"
#include "diffgt/eval/diagnostics.hpp"
#include "diffgt/eval/metrics.hpp"
#include "diffgt/eval/timing.hpp"
#include "diffgt/graph/dataset.hpp"
#include "diffgt/model/encoder.hpp"
#include "diffgt/training/checkpoint.hpp"
#include "diffgt/training/losses.hpp"
#include "diffgt/training/trainer.hpp"
#include "support/oracles.hpp"

using namespace diffgt;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

TrainConfig toy_config() {
  TrainConfig c;
  c.model.dim = 4;
  c.model.k_lin = 3;
  c.steps = 10;
  c.reverse_samples = 3;
  c.batch_size = 4;
  c.top_n = 1;
  return c;
}

Outcome gradients() {
  const auto t0 = Clock::now();
  RandomSource rng(101);
  double worst = 0.0;
  std::string where;
  const auto note = [&](const std::string& name, const testing::GradCheck& g) {
    if (g.max_rel_error > worst) {
      worst = g.max_rel_error;
      where = name + " " + g.worst;
    }
  };
  const Matrix pos = standard_normal(rng, 8, 1), neg = standard_normal(rng, 8, 1);
  note("bpr", testing::check_gradients({{"p", pos}, {"n", neg}},
                                       [](Tape& t) { return bpr_loss(t.param("p"), t.param("n")); }));
  const Matrix x0 = standard_normal(rng, 8, 8), x1 = standard_normal(rng, 8, 8);
  note("diff", testing::check_gradients({{"a", x0}, {"b", x1}},
                                        [](Tape& t) { return diffusion_loss(t.param("a"), t.param("b")); }));
  note("cl", testing::check_gradients({{"a", x0}, {"b", x1}},
                                      [](Tape& t) { return contrastive_loss(t.param("a"), t.param("b"), 0.2); }));

  const DatasetBundle bundle = testing::toy_bundle();
  for (auto attention : {AttentionKind::kLinear, AttentionKind::kFull}) {
    for (auto noise : {NoiseMode::kDirectional, NoiseMode::kIsotropic}) {
      TrainConfig cfg = toy_config();
      cfg.model.attention = attention;
      cfg.noise = noise;
      const ModelContext ctx = make_context(bundle, cfg);
      ParamSet params = init_params(cfg, ctx.graph.num_nodes());
      for (auto& [name, m] : params)
        if (!name.ends_with(".compress")) for (double& v : m.values()) v += 0.2 * rng.normal();
      Minibatch batch;
      batch.users = {0, 1, 2, 3, 1};
      batch.positive_rows = {4, 5, 4, 6, 6};
      batch.negative_rows = {7, 4, 5, 7, 7};
      batch.step = 1 + rng.uniform_index(cfg.steps);
      batch.noise = standard_normal(rng, ctx.graph.num_nodes(), cfg.model.dim);
      note("composite", testing::check_gradients(params, [&](Tape& t) { return batch_losses(t, ctx, cfg, batch).total; }));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 60.0,
          "max relative error " + fmt(worst) + " (tolerance 1e-4; worst " + where + "), " + fmt(secs) + " s (limit 60 s)"};
}

Outcome moments() {
  const NoiseSchedule s = make_schedule(50, kDefaultBetaStart, kDefaultBetaEnd);
  RandomSource rng(102);
  const double x0 = 0.8;
  const Matrix column(100000, 1, x0);
  double worst = 0.0;
  for (std::size_t t : {std::size_t{1}, std::size_t{25}, std::size_t{50}}) {
    const Matrix xt = forward_diffuse(column, t, s, NoiseMode::kIsotropic, rng).x_t;
    double mean = 0.0;
    for (double v : xt.values()) mean += v;
    mean /= static_cast<double>(xt.size());
    double var = 0.0;
    for (double v : xt.values()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(xt.size() - 1);
    worst = std::max({worst, std::abs(mean - std::sqrt(s.alpha_bar(t)) * x0), std::abs(var - (1.0 - s.alpha_bar(t)))});
  }
  return {worst <= 1e-2, "largest moment error " + fmt(worst) + " over t in {1,25,50} (tolerance 1e-2)"};
}

Outcome sign_law() {
  const NoiseSchedule s = make_schedule(50, kDefaultBetaStart, kDefaultBetaEnd);
  RandomSource rng(103);
  std::size_t checked = 0, violations = 0;
  for (int block = 0; block < 10; ++block) {
    const Matrix x0 = standard_normal(rng, 1000, 100);
    const DiffusionBatch b = forward_diffuse(x0, 1 + rng.uniform_index(50), s, NoiseMode::kDirectional, rng);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      const double x = x0.values()[i];
      if (x == 0.0) continue;
      ++checked;
      const double e = b.noise.values()[i];
      if ((e > 0.0) != (x > 0.0) || e == 0.0) ++violations;
    }
  }
  return {violations == 0 && checked >= 1000000,
          std::to_string(violations) + " violations over " + std::to_string(checked) + " coordinates"};
}

Outcome posterior() {
  const NoiseSchedule s = make_schedule(50, kDefaultBetaStart, kDefaultBetaEnd);
  double worst = 0.0;
  std::size_t worst_t = 0;
  for (std::size_t t = 2; t <= s.steps(); ++t) {
    const PosteriorCoefficients c = posterior_coefficients(s, t);
    const double dev = std::abs(c.x0_coef + c.xt_coef - 1.0);
    if (dev > worst) {
      worst = dev;
      worst_t = t;
    }
  }
  RandomSource rng(104);
  const Matrix xt = standard_normal(rng, 20, 8), x0 = standard_normal(rng, 20, 8);
  const bool terminal = reverse_posterior_mean(xt, x0, 1, s).mean == x0;
  return {worst <= 1e-12 && terminal,
          "max |coef sum - 1| = " + fmt(worst) + " at t=" + std::to_string(worst_t) +
              " (tolerance 1e-12); terminal step returns x0_hat exactly: " + (terminal ? "yes" : "no")};
}

double fast_recall(const std::vector<std::size_t>& ranked, const std::vector<char>& rel, std::size_t nrel, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) hits += rel[ranked[r]] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(nrel);
}

double fast_ndcg(const std::vector<std::size_t>& ranked, const std::vector<char>& rel, std::size_t nrel, std::size_t k) {
  double dcg = 0.0, idcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
    const double disc = 1.0 / std::log2(static_cast<double>(r) + 2.0);
    if (rel[ranked[r]]) dcg += disc;
    if (r < nrel) idcg += disc;
  }
  return dcg / idcg;
}

Outcome metric_oracles() {
  const auto t0 = Clock::now();
  std::size_t cases = 0, mismatches = 0;
  // Every ranking of every catalogue up to 8 items, against every relevant set
  // and every cutoff 1..n+1.
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<char> flags(n);
    std::vector<std::size_t> rel;
    do {
      for (unsigned mask = 1; mask < (1u << n); ++mask) {
        rel.clear();
        for (std::size_t i = 0; i < n; ++i) {
          flags[i] = (mask >> i) & 1u;
          if (flags[i]) rel.push_back(i);
        }
        for (std::size_t k = 1; k <= n + 1; ++k) {
          ++cases;
          if (std::abs(recall_at_k(perm, rel, k) - fast_recall(perm, flags, rel.size(), k)) > 1e-12 ||
              std::abs(ndcg_at_k(perm, rel, k) - fast_ndcg(perm, flags, rel.size(), k)) > 1e-12) {
            ++mismatches;
          }
        }
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  // The fast oracle itself agrees with the set-based definitions.
  RandomSource rng(105);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 9 + rng.uniform_index(200);
    std::vector<std::size_t> ranked(n);
    std::iota(ranked.begin(), ranked.end(), std::size_t{0});
    for (std::size_t j = n; j > 1; --j) std::swap(ranked[j - 1], ranked[rng.uniform_index(j)]);
    ranked.resize(1 + rng.uniform_index(n));
    std::set<std::size_t> relevant;
    const std::size_t nrel = 1 + rng.uniform_index(n / 2);
    while (relevant.size() < nrel) relevant.insert(rng.uniform_index(n));
    const std::vector<std::size_t> rel(relevant.begin(), relevant.end());
    const std::size_t k = 1 + rng.uniform_index(n + 5);
    ++cases;
    if (std::abs(recall_at_k(ranked, rel, k) - testing::oracle_recall(ranked, relevant, k)) > 1e-12 ||
        std::abs(ndcg_at_k(ranked, rel, k) - testing::oracle_ndcg(ranked, relevant, k)) > 1e-12) {
      ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over " + std::to_string(cases) +
                               " cases (exhaustive n<=8 plus 1000 random larger), " + fmt(seconds_since(t0)) + " s"};
}

Outcome snr_ordering() {
  const auto t0 = Clock::now();
  const NoiseSchedule s = make_schedule(50, kDefaultBetaStart, kDefaultBetaEnd);
  std::vector<std::size_t> steps;
  for (std::size_t t = 0; t <= 50; t += 5) steps.push_back(t);
  int seeds_ok = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RandomSource rng(seed);
    const LabelledPoints pts = anisotropic_clusters(300, 16, rng);
    const SnrCurve iso = snr_curve(pts.x, pts.labels, s, NoiseMode::kIsotropic, steps, rng);
    const SnrCurve dir = snr_curve(pts.x, pts.labels, s, NoiseMode::kDirectional, steps, rng);
    bool ok = true;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      ok = ok && dir.snr[i] >= iso.snr[i];
      if (steps[i] > 0) min_margin = std::min(min_margin, dir.snr[i] / iso.snr[i]);
    }
    seeds_ok += ok ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  return {seeds_ok == 5 && secs < 300.0, std::to_string(seeds_ok) + "/5 seeds ordered at every step 0..50 (stride 5); "
                                             "smallest directional/isotropic ratio for t>0 " + fmt(min_margin) + ", " +
                                             fmt(secs) + " s"};
}

fs::path data_dir() {
  if (const char* env = std::getenv("DIFFGT_ML100K_DIR"); env && *env) return env;
  return DIFFGT_ML100K_DIR;
}

Outcome ablation() {
  const fs::path dir = data_dir();
  if (!fs::exists(dir / "ratings.tsv")) {
    return {false, "MovieLens-100K not found in " + dir.string() + " (run scripts/fetch_ml100k.py)"};
  }
  const Dataset ds = ingest((dir / "ratings.tsv").string(), (dir / "item_side.tsv").string(), (dir / "user_side.tsv").string());
  const TrainConfig base = load_config(DIFFGT_ACCEPTANCE_CONFIG);
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double longest = 0.0;
  auto last = Clock::now();
  const auto reports = ablate(ds, base, {"-Direction", "-DiffL"}, seeds, 20, [&](const std::string& line) {
    longest = std::max(longest, seconds_since(last));
    last = Clock::now();
    std::cout << "  [7] " << line << std::endl;
  });
  const double full = reports[0].base_recall.mean;
  bool ok = longest <= 1800.0;
  std::string detail = "full " + fmt(full);
  for (const auto& r : reports) {
    ok = ok && full > r.variant_recall.mean;
    detail += ", " + r.variant + " " + fmt(r.variant_recall.mean) + " (base wins " + std::to_string(r.base_wins) + "/5)";
  }
  return {ok, "mean Recall@20 over 5 seeds: " + detail + "; longest run " + fmt(longest) + " s (limit 1800 s)"};
}

Outcome efficiency() {
  TimingSetup setup;
  setup.repeats = 3;
  const auto reports = timing_harness(setup, timing_variants());
  const auto get = [&](const std::string& v) {
    return *std::find_if(reports.begin(), reports.end(), [&](const TimingReport& r) { return r.variant == v; });
  };
  const TimingReport discrete = get("discrete"), continuous = get("continuous"), linear = get("continuous-linear"),
                     sampled = get("continuous-sampling"), diffgt = get("DiffGT");
  TimingSetup doubled = setup;
  doubled.nodes *= 2;
  const double t1 = reverse_seconds(setup, "continuous-linear");
  const double t2 = reverse_seconds(doubled, "continuous-linear");
  const bool fwd = continuous.forward_seconds < discrete.forward_seconds;
  const bool rev = sampled.reverse_seconds < continuous.reverse_seconds && diffgt.reverse_seconds < linear.reverse_seconds;
  const double ratio = t2 / t1;
  return {fwd && rev && ratio < 3.0,
          "forward continuous " + fmt(continuous.forward_seconds) + " s vs discrete " + fmt(discrete.forward_seconds) +
              " s; reverse K=5 " + fmt(sampled.reverse_seconds) + " s vs T=50 " + fmt(continuous.reverse_seconds) +
              " s (full attention), " + fmt(diffgt.reverse_seconds) + " s vs " + fmt(linear.reverse_seconds) +
              " s (linear); linear reverse time(2N)/time(N) = " + fmt(ratio) + " (limit 3)"};
}

DatasetBundle synthetic_bundle() {
  RandomSource rng(106);
  std::vector<Edge> edges;
  for (std::uint32_t u = 0; u < 30; ++u)
    for (int j = 0; j < 8; ++j) edges.push_back({u, static_cast<std::uint32_t>(rng.uniform_index(40))});
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  Dataset d;
  d.graph = InteractionGraph(30, 40, edges);
  for (int u = 0; u < 30; ++u) d.user_ids.push_back("u" + std::to_string(u));
  for (int i = 0; i < 40; ++i) d.item_ids.push_back("i" + std::to_string(i));
  d.side.items.vocabulary = {"a", "b", "c", "d"};
  d.side.items.features = Matrix(40, 4);
  for (std::size_t i = 0; i < 40; ++i) {
    d.side.items.features(i, i % 4) = 1.0;
    d.side.items.features(i, (i / 4) % 4) = 1.0;
  }
  return DatasetBundle{d, split(d.graph, 7)};
}

Outcome determinism() {
  const DatasetBundle bundle = synthetic_bundle();
  TrainConfig cfg = toy_config();
  cfg.model.dim = 8;
  cfg.batch_size = 32;
  cfg.max_epochs = 15;
  bool same = true;
  for (auto inference : {InferenceMode::kSingleStep, InferenceMode::kChain}) {
    cfg.inference = inference;
    const ModelState a = train(bundle, cfg).state;
    const ModelState b = train(bundle, cfg).state;
    same = same && checkpoint_bytes(a) == checkpoint_bytes(b) &&
           report_to_csv(evaluate(a, bundle, 20), bundle.split) == report_to_csv(evaluate(b, bundle, 20), bundle.split);
  }
  return {same, same ? "checkpoints and metric reports byte-identical across two runs (single-step and chain inference)"
                     : "runs differ"};
}

Outcome smoke() {
  const DatasetBundle bundle = testing::toy_bundle();
  TrainConfig cfg = toy_config();
  cfg.max_epochs = 200;
  cfg.patience = 1000;
  cfg.learning_rate = 1e-2;
  const TrainResult r = train(bundle, cfg);
  const double first = r.log.front().total, last = r.log.back().total;

  TrainConfig flat = toy_config();
  flat.learning_rate = 0.0;
  flat.patience = 5;
  flat.max_epochs = 200;
  const TrainResult p = train(bundle, flat);
  const bool stopped = p.stopped_early && p.log.size() <= flat.patience + 1;
  return {r.log.size() == 200 && last < first && stopped,
          "200 epochs: total " + fmt(first) + " -> " + fmt(last) + "; plateau (lr 0, patience 5) stopped after " +
              std::to_string(p.log.size()) + " epochs"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient integrity", gradients},       {"forward-process moments", moments},
      {"directional sign law", sign_law},      {"reverse-posterior identities", posterior},
      {"metric oracles", metric_oracles},      {"SNR ordering", snr_ordering},
      {"ablation direction-of-effect", ablation}, {"efficiency ordering", efficiency},
      {"determinism", determinism},            {"end-to-end smoke", smoke},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << id << " [" << (o.pass ? "PASS" : "FAIL") << "] " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
