#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "diffgt/diffusion/schedule.hpp"
#include "diffgt/graph/bundle.hpp"
#include "diffgt/model/condition.hpp"
#include "diffgt/model/denoiser.hpp"
#include "diffgt/numerics/sparse.hpp"
#include "diffgt/training/checkpoint.hpp"
#include "diffgt/training/config.hpp"

namespace diffgt {

/// Derived, read-only structures shared by training and inference.
struct ModelContext {
  InteractionGraph graph;  ///< training edges, enriched when side info is on
  std::shared_ptr<const SparseMatrix> normalized;
  ConditionOperator condition;
  NoiseSchedule schedule;
  std::vector<std::vector<std::size_t>> train_items;
};

ModelContext make_context(const DatasetBundle& bundle, const TrainConfig& config);

/// Fresh embedding table ("embedding", N×d Xavier) and denoiser parameters.
ParamSet init_params(const TrainConfig& config, std::size_t nodes);

/// Encoder output X_G for the given parameters.
Matrix encoded_embeddings(const ParamSet& params, const TrainConfig& config, const ModelContext& ctx);

/// Embeddings used for ranking. With score_with = encoder this is X_G.
/// Otherwise X_G is diffused to a seeded sampled step t′ and denoised once, or,
/// in chain mode, diffused to the first of K seeded sampled steps and walked
/// down the chain through posterior means, returning the last x̂₀.
Matrix final_embeddings(const ParamSet& params, const TrainConfig& config, const ModelContext& ctx);

/// One minibatch of (user, positive, negative) triples with token-row indices
/// (items offset by N_u), its diffusion step and the unscaled noise ε′ (N×d).
struct Minibatch {
  std::vector<std::size_t> users;
  std::vector<std::size_t> positive_rows;
  std::vector<std::size_t> negative_rows;
  std::size_t step = 1;
  Matrix noise;
};

struct BatchLosses {
  Var bpr;
  Var diffusion;
  Var contrastive;
  Var total;
};

/// Records the full training objective for one minibatch on `tape`, whose
/// parameters must already be registered: encode, diffuse with the given
/// noise, denoise with the condition, then BPR on the scored embeddings,
/// x̂₀-MSE against X_G and same-class in-batch InfoNCE between X_G and x̂₀.
BatchLosses batch_losses(Tape& tape, const ModelContext& ctx, const TrainConfig& config, const Minibatch& batch);

struct EpochLog {
  std::size_t epoch = 0;
  double bpr = 0.0;
  double diff = 0.0;
  double cl = 0.0;
  double total = 0.0;
  double val_loss = 0.0;
};

/// `epoch,bpr,diff,cl,total,val_loss` with round-trip precision.
std::string log_to_csv(const std::vector<EpochLog>& log);

/// Stops once `patience` epochs pass without a strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Records the epoch's validation loss; true when training should stop.
  bool observe(std::size_t epoch, double value);
  bool improved() const { return improved_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_value() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  bool improved_ = false;
};

struct TrainOptions {
  /// Where the last finite parameters go when the loss diverges; empty
  /// disables the dump.
  std::string dump_path;
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainResult {
  ModelState state;  ///< best-validation parameters
  std::vector<EpochLog> log;
  bool stopped_early = false;
};

/// Throws DivergenceError when a loss becomes non-finite.
TrainResult train(const DatasetBundle& bundle, const TrainConfig& config, const TrainOptions& options = {});

}  // namespace diffgt
