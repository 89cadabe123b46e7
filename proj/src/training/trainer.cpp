#include "diffgt/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "diffgt/diffusion/forward.hpp"
#include "diffgt/diffusion/reverse.hpp"
#include "diffgt/error.hpp"
#include "diffgt/model/encoder.hpp"
#include "diffgt/model/score.hpp"
#include "diffgt/training/losses.hpp"
#include "diffgt/training/optimizer.hpp"

namespace diffgt {
namespace {

enum StreamTag : std::uint64_t {
  kEmbeddingInit = 1,
  kDenoiserInit = 2,
  kValidationNegatives = 3,
  kInference = 4,
  kEpochBase = 1000,
};

bool contains_sorted(const std::vector<std::size_t>& sorted, std::size_t value) {
  return std::binary_search(sorted.begin(), sorted.end(), value);
}

std::size_t sample_negative(const std::vector<std::size_t>& seen, std::size_t num_items, RandomSource& rng) {
  if (seen.size() >= num_items) return rng.uniform_index(num_items);
  for (;;) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(num_items));
    if (!contains_sorted(seen, j)) return j;
  }
}

Matrix noise_for(const Matrix& x0, NoiseMode mode, const ColumnStats& stats, RandomSource& rng) {
  if (mode == NoiseMode::kDirectional) return directional_noise(x0, rng, stats.mean, stats.stddev);
  return standard_normal(rng, x0.rows(), x0.cols());
}

Matrix denoise_values(const ParamSet& params, const ModelConfig& model, const Matrix& x_t, const Matrix& condition,
                      std::size_t t) {
  Tape tape;
  register_params(tape, params);
  return denoise(tape.constant(x_t), tape.constant(condition), t, model).value();
}

std::vector<std::size_t> unique_sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool params_finite(const ParamSet& params) {
  return std::all_of(params.begin(), params.end(), [](const auto& kv) { return all_finite(kv.second); });
}

struct ValidationSet {
  std::vector<std::size_t> users;
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
};

double validation_loss(const ValidationSet& val, const Matrix& emb, std::size_t num_users) {
  std::vector<double> pos(val.users.size());
  std::vector<double> neg(val.users.size());
  for (std::size_t e = 0; e < val.users.size(); ++e) {
    const auto u = emb.row(val.users[e]);
    const auto ip = emb.row(num_users + val.positives[e]);
    const auto in = emb.row(num_users + val.negatives[e]);
    pos[e] = std::inner_product(u.begin(), u.end(), ip.begin(), 0.0);
    neg[e] = std::inner_product(u.begin(), u.end(), in.begin(), 0.0);
  }
  return bpr_loss(pos, neg);
}

}  // namespace

ModelContext make_context(const DatasetBundle& bundle, const TrainConfig& config) {
  const auto& full = bundle.dataset.graph;
  InteractionGraph graph(full.num_users(), full.num_items(), bundle.split.train);
  if (config.use_side) graph = enrich_with_side_info(graph, bundle.dataset.side, config.top_n);
  auto normalized = std::make_shared<const SparseMatrix>(normalize_adjacency(graph));
  return ModelContext{
      std::move(graph),
      std::move(normalized),
      ConditionOperator(full.num_users(), full.num_items(), bundle.split.train),
      make_schedule(config.steps, config.beta_start, config.beta_end),
      items_by_user(full.num_users(), bundle.split.train),
  };
}

ParamSet init_params(const TrainConfig& config, std::size_t nodes) {
  const RandomSource root(config.seed);
  RandomSource emb_rng = root.derive(kEmbeddingInit);
  RandomSource den_rng = root.derive(kDenoiserInit);
  ParamSet params = init_denoiser_params(config.model, nodes, den_rng);
  params["embedding"] = xavier_uniform(nodes, config.model.dim, emb_rng);
  return params;
}

Matrix encoded_embeddings(const ParamSet& params, const TrainConfig& config, const ModelContext& ctx) {
  return encode(*ctx.normalized, params.at("embedding"), config.model.encoder_layers);
}

Matrix final_embeddings(const ParamSet& params, const TrainConfig& config, const ModelContext& ctx) {
  Matrix x_g = encoded_embeddings(params, config, ctx);
  if (config.score_with == ScoreSource::kEncoder) return x_g;
  RandomSource rng = RandomSource(config.seed).derive(kInference);
  const std::size_t samples = config.inference == InferenceMode::kChain ? config.reverse_samples : 1;
  const auto steps = sample_reverse_steps(config.steps, samples, rng);
  const Matrix condition = ctx.condition.token_conditions(x_g);
  Matrix x = interpolate(x_g, noise_for(x_g, config.noise, column_stats(x_g), rng), steps.front(), ctx.schedule);
  Matrix x0_hat;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    x0_hat = denoise_values(params, config.model, x, condition, steps[k]);
    if (k + 1 < steps.size()) x = posterior_mean_between(x, x0_hat, steps[k], steps[k + 1], ctx.schedule).mean;
  }
  return x0_hat;
}

BatchLosses batch_losses(Tape& tape, const ModelContext& ctx, const TrainConfig& config, const Minibatch& batch) {
  Var x_g = encode(ctx.normalized, tape.param("embedding"), config.model.encoder_layers);
  if (!batch.noise.same_shape(x_g.value())) {
    throw ShapeError("batch noise " + shape_string(batch.noise) + " vs embeddings " + shape_string(x_g.value()));
  }
  const double a_bar = ctx.schedule.alpha_bar(batch.step);
  Var x_t = ad::add(ad::scale(x_g, std::sqrt(a_bar)), tape.constant(batch.noise * std::sqrt(1.0 - a_bar)));
  Var x0_hat = denoise(x_t, ctx.condition.token_conditions(x_g), batch.step, config.model);

  Var scored = config.score_with == ScoreSource::kDenoised ? x0_hat : x_g;
  Var u_emb = ad::gather_rows(scored, batch.users);
  Var l_bpr = bpr_loss(ad::row_dot(u_emb, ad::gather_rows(scored, batch.positive_rows)),
                       ad::row_dot(u_emb, ad::gather_rows(scored, batch.negative_rows)));
  Var l_diff = diffusion_loss(x_g, x0_hat);

  const auto batch_users = unique_sorted(batch.users);
  const auto batch_items = unique_sorted(batch.positive_rows);
  const double tau = config.weights.temperature;
  Var cl_users = contrastive_loss(ad::gather_rows(x_g, batch_users), ad::gather_rows(x0_hat, batch_users), tau);
  Var cl_items = contrastive_loss(ad::gather_rows(x_g, batch_items), ad::gather_rows(x0_hat, batch_items), tau);
  const double nu = static_cast<double>(batch_users.size());
  const double ni = static_cast<double>(batch_items.size());
  Var l_cl = ad::add(ad::scale(cl_users, nu / (nu + ni)), ad::scale(cl_items, ni / (nu + ni)));

  return BatchLosses{l_bpr, l_diff, l_cl, total_loss(l_bpr, l_diff, l_cl, config.weights)};
}

std::string log_to_csv(const std::vector<EpochLog>& log) {
  std::ostringstream out;
  out << "epoch,bpr,diff,cl,total,val_loss\n" << std::setprecision(17);
  for (const auto& r : log) {
    out << r.epoch << ',' << r.bpr << ',' << r.diff << ',' << r.cl << ',' << r.total << ',' << r.val_loss << '\n';
  }
  return out.str();
}

bool EarlyStopping::observe(std::size_t epoch, double value) {
  improved_ = value < best_;
  if (improved_) {
    best_ = value;
    best_epoch_ = epoch;
  }
  return epoch - best_epoch_ >= patience_;
}

TrainResult train(const DatasetBundle& bundle, const TrainConfig& config, const TrainOptions& options) {
  validate(config);
  const ModelContext ctx = make_context(bundle, config);
  const std::size_t nu = ctx.graph.num_users();
  const std::size_t ni = ctx.graph.num_items();
  const std::size_t n = nu + ni;
  const RandomSource root(config.seed);

  ParamSet params = init_params(config, n);
  Adam adam(config.learning_rate);

  ValidationSet val;
  {
    // Without validation edges the same fixed-negative loss is tracked on the
    // training edges, so a stalled model shows up as a plateau.
    const auto& monitored = bundle.split.validation().empty() ? bundle.split.train : bundle.split.validation();
    RandomSource rng = root.derive(kValidationNegatives);
    for (const Edge& e : monitored) {
      val.users.push_back(e.user);
      val.positives.push_back(e.item);
      std::vector<std::size_t> seen = ctx.train_items[e.user];
      seen.insert(std::upper_bound(seen.begin(), seen.end(), e.item), e.item);
      val.negatives.push_back(sample_negative(seen, ni, rng));
    }
  }

  std::vector<Edge> order = bundle.split.train;
  TrainResult result;
  result.state = ModelState{config, params, dataset_hash(bundle), 0};
  EarlyStopping stopper(config.patience);

  const auto diverged = [&](std::size_t epoch, const std::string& what) {
    std::string path;
    if (!options.dump_path.empty() && params_finite(params)) {
      path = options.dump_path;
      save_checkpoint(ModelState{config, params, result.state.dataset_hash, epoch}, path);
    }
    throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ": " + what, path);
  };

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    RandomSource rng = root.derive(kEpochBase + epoch);
    const auto steps = sample_reverse_steps(config.steps, config.reverse_samples, rng);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
    const ColumnStats stats = column_stats(encoded_embeddings(params, config, ctx));

    EpochLog row{epoch};
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batches) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::size_t t = steps[batches % steps.size()];
      std::vector<std::size_t> users;
      std::vector<std::size_t> pos_rows;
      std::vector<std::size_t> neg_rows;
      for (std::size_t b = start; b < end; ++b) {
        users.push_back(order[b].user);
        pos_rows.push_back(nu + order[b].item);
        neg_rows.push_back(nu + sample_negative(ctx.train_items[order[b].user], ni, rng));
      }

      Minibatch batch{std::move(users), std::move(pos_rows), std::move(neg_rows), t, {}};
      const Matrix x_g_value = encoded_embeddings(params, config, ctx);
      batch.noise = noise_for(x_g_value, config.noise, stats, rng);

      Tape tape;
      register_params(tape, params);
      const BatchLosses losses = batch_losses(tape, ctx, config, batch);
      const double total_value = losses.total.value()(0, 0);
      if (!std::isfinite(total_value)) diverged(epoch, "non-finite training loss");

      row.bpr += losses.bpr.value()(0, 0);
      row.diff += losses.diffusion.value()(0, 0);
      row.cl += losses.contrastive.value()(0, 0);
      row.total += total_value;

      const Gradients grads = tape.gradient_of(losses.total);
      adam.step(params, grads);
    }
    const double denom = static_cast<double>(std::max<std::size_t>(batches, 1));
    row.bpr /= denom;
    row.diff /= denom;
    row.cl /= denom;
    row.total /= denom;

    if (!params_finite(params)) diverged(epoch, "non-finite parameters after update");
    row.val_loss = validation_loss(val, final_embeddings(params, config, ctx), nu);
    if (!std::isfinite(row.val_loss)) diverged(epoch, "non-finite validation loss");

    result.log.push_back(row);
    if (options.on_epoch) options.on_epoch(row);
    const bool stop = stopper.observe(epoch, row.val_loss);
    if (stopper.improved()) {
      result.state.params = params;
      result.state.best_epoch = epoch;
    }
    if (stop) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace diffgt
