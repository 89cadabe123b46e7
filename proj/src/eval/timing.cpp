#include "diffgt/eval/timing.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>

#include "diffgt/diffusion/discrete.hpp"
#include "diffgt/diffusion/forward.hpp"
#include "diffgt/diffusion/reverse.hpp"
#include "diffgt/error.hpp"
#include "diffgt/eval/metrics.hpp"
#include "diffgt/model/encoder.hpp"
#include "diffgt/training/trainer.hpp"

namespace diffgt {
namespace {

struct Variant {
  bool discrete = false;
  AttentionKind attention = AttentionKind::kFull;
  bool sampled = false;
};

Variant parse_variant(const std::string& name) {
  if (name == "discrete") return {true, AttentionKind::kFull, false};
  if (name == "continuous") return {false, AttentionKind::kFull, false};
  if (name == "continuous-linear") return {false, AttentionKind::kLinear, false};
  if (name == "continuous-sampling") return {false, AttentionKind::kFull, true};
  if (name == "DiffGT") return {false, AttentionKind::kLinear, true};
  std::string valid;
  for (const auto& v : timing_variants()) valid += (valid.empty() ? "" : ", ") + v;
  throw ConfigError("unknown timing variant '" + name + "'; valid: " + valid);
}

InteractionGraph synthetic_graph(const TimingSetup& s) {
  const std::size_t nu = s.nodes / 2;
  const std::size_t ni = s.nodes - nu;
  RandomSource rng(s.seed);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t e = 0; e < std::min(s.degree, ni); ++e)
      edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(rng.uniform_index(ni))});
  return InteractionGraph(nu, ni, edges);
}

template <typename F>
double min_seconds(std::size_t repeats, F&& body) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

struct Bench {
  InteractionGraph graph;
  SparseMatrix normalized;
  Matrix table;
  NoiseSchedule schedule;
  ModelConfig model;
  ParamSet params;
  Matrix condition;
};

Bench make_bench(const TimingSetup& s) {
  InteractionGraph g = synthetic_graph(s);
  SparseMatrix norm = normalize_adjacency(g);
  RandomSource rng = RandomSource(s.seed).derive(1);
  Matrix table = xavier_uniform(g.num_nodes(), s.dim, rng);
  ModelConfig model;
  model.dim = s.dim;
  model.encoder_layers = s.encoder_layers;
  model.denoiser_layers = s.denoiser_layers;
  model.k_lin = s.k_lin;
  RandomSource prng = RandomSource(s.seed).derive(2);
  ParamSet params = init_denoiser_params(model, g.num_nodes(), prng);
  Matrix encoded = encode(norm, table, s.encoder_layers);
  ConditionOperator cond(g.num_users(), g.num_items(), g.edges());
  Matrix condition = cond.token_conditions(encoded);
  return Bench{std::move(g), std::move(norm), std::move(table), make_schedule(s.steps, kDefaultBetaStart, kDefaultBetaEnd),
               model, std::move(params), std::move(condition)};
}

double time_forward(const Bench& b, const TimingSetup& s, const Variant& v) {
  if (v.discrete) {
    std::vector<double> flips(s.steps);
    for (std::size_t t = 1; t <= s.steps; ++t) flips[t - 1] = b.schedule.beta(t);
    const BinaryMatrix start = BinaryMatrix::from_adjacency(b.graph.enriched_adjacency());
    return min_seconds(s.repeats, [&] {
      RandomSource rng(s.seed);
      BinaryMatrix state = start;
      for (std::size_t t = 1; t <= s.steps; ++t) {
        state = discrete_forward(state, 1, std::span<const double>(flips).subspan(t - 1, 1), rng);
        const Matrix encoded = encode(normalize_adjacency(state.to_sparse()), b.table, s.encoder_layers);
        (void)encoded;
      }
    });
  }
  return min_seconds(s.repeats, [&] {
    RandomSource rng(s.seed);
    for (std::size_t t = 1; t <= s.steps; ++t) {
      const Matrix encoded = encode(b.normalized, b.table, s.encoder_layers);
      const DiffusionBatch batch = forward_diffuse(encoded, t, b.schedule, NoiseMode::kDirectional, rng);
      (void)batch;
    }
  });
}

double time_reverse(const Bench& b, const TimingSetup& s, const Variant& v) {
  ModelConfig model = b.model;
  model.attention = v.attention;
  return min_seconds(s.repeats, [&] {
    RandomSource rng(s.seed);
    std::vector<std::size_t> steps;
    if (v.sampled) {
      steps = sample_reverse_steps(s.steps, s.samples, rng);
    } else {
      for (std::size_t t = s.steps; t >= 1; --t) steps.push_back(t);
    }
    const Matrix encoded = encode(b.normalized, b.table, s.encoder_layers);
    Matrix x = forward_diffuse(encoded, steps.front(), b.schedule, NoiseMode::kDirectional, rng).x_t;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      Tape tape;
      register_params(tape, b.params);
      const Matrix x0_hat = denoise(tape.constant(x), tape.constant(b.condition), steps[k], model).value();
      if (k + 1 < steps.size()) x = posterior_mean_between(x, x0_hat, steps[k], steps[k + 1], b.schedule).mean;
    }
  });
}

}  // namespace

const std::vector<std::string>& timing_variants() {
  static const std::vector<std::string> names = {"discrete", "continuous", "continuous-linear", "continuous-sampling",
                                                 "DiffGT"};
  return names;
}

std::vector<TimingReport> timing_harness(const TimingSetup& setup, const std::vector<std::string>& variants) {
  std::vector<Variant> parsed;
  for (const auto& name : variants) parsed.push_back(parse_variant(name));
  const Bench bench = make_bench(setup);
  std::vector<TimingReport> out;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    TimingReport r;
    r.variant = variants[i];
    r.forward_seconds = time_forward(bench, setup, parsed[i]);
    r.reverse_seconds = time_reverse(bench, setup, parsed[i]);
    out.push_back(std::move(r));
  }
  return out;
}

double reverse_seconds(const TimingSetup& setup, const std::string& variant) {
  const Variant v = parse_variant(variant);
  return time_reverse(make_bench(setup), setup, v);
}

void attach_metrics(std::vector<TimingReport>& reports, const ModelState& state, const DatasetBundle& bundle,
                    std::size_t k) {
  for (auto& r : reports) {
    const Variant v = parse_variant(r.variant);
    if (v.discrete) continue;
    ModelState variant_state = state;
    TrainConfig& c = variant_state.config;
    c.model.attention = v.attention;
    c.inference = InferenceMode::kChain;
    c.reverse_samples = v.sampled ? c.reverse_samples : c.steps;
    const MetricReport m = evaluate(variant_state, bundle, k);
    r.recall = m.recall.mean;
    r.ndcg = m.ndcg.mean;
  }
}

std::string timing_to_csv(const std::vector<TimingReport>& reports) {
  std::ostringstream out;
  out << std::setprecision(9) << "variant,forward_seconds,reverse_seconds,recall,ndcg\n";
  for (const auto& r : reports) {
    out << r.variant << ',' << r.forward_seconds << ',' << r.reverse_seconds << ',';
    if (r.recall) out << *r.recall; else out << "n/a";
    out << ',';
    if (r.ndcg) out << *r.ndcg; else out << "n/a";
    out << '\n';
  }
  return out.str();
}

std::string timing_to_table(const std::vector<TimingReport>& reports) {
  std::ostringstream out;
  out << std::left << std::setw(22) << "variant" << std::setw(14) << "forward(s)" << std::setw(14) << "reverse(s)"
      << std::setw(10) << "recall" << "ndcg\n";
  out << std::fixed;
  for (const auto& r : reports) {
    out << std::setw(22) << r.variant << std::setprecision(4) << std::setw(14) << r.forward_seconds << std::setw(14)
        << r.reverse_seconds;
    if (r.recall) out << std::setw(10) << *r.recall << *r.ndcg; else out << std::setw(10) << "n/a" << "n/a";
    out << '\n';
  }
  return out.str();
}

}  // namespace diffgt
