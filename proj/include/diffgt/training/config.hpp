#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "diffgt/diffusion/forward.hpp"
#include "diffgt/model/config.hpp"

namespace diffgt {

/// Weights of the diffusion and contrastive terms, and the contrastive temperature.
struct LossWeights {
  double diffusion = 0.5;
  double contrastive = 0.1;
  double temperature = 0.2;

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// Which embeddings the ranking loss and the evaluation score.
enum class ScoreSource { kDenoised, kEncoder };

/// How ranking embeddings are produced from X_G: one denoising pass at a
/// seeded sampled step, or a walk down K seeded sampled steps.
enum class InferenceMode { kSingleStep, kChain };

std::string_view to_string(ScoreSource source);
ScoreSource score_source_from_string(std::string_view name);

std::string_view to_string(InferenceMode mode);
InferenceMode inference_mode_from_string(std::string_view name);

struct TrainConfig {
  std::uint64_t seed = 2024;
  ModelConfig model;
  std::size_t steps = 50;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  std::size_t reverse_samples = 5;
  NoiseMode noise = NoiseMode::kDirectional;
  double learning_rate = 1e-3;
  std::size_t batch_size = 2048;
  std::size_t max_epochs = 1000;
  std::size_t patience = 50;
  LossWeights weights;
  bool use_side = true;
  std::size_t top_n = 10;
  ScoreSource score_with = ScoreSource::kDenoised;
  InferenceMode inference = InferenceMode::kSingleStep;
  /// Name of the ablation applied to this config, empty for the full model.
  std::string ablation;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Throws ConfigError for values outside their valid ranges.
void validate(const TrainConfig& config);

/// Canonical JSON (fixed key order, no whitespace).
std::string config_to_json(const TrainConfig& config);
/// Missing keys keep their defaults; unknown keys, wrong types and a wrong
/// version are ConfigErrors.
TrainConfig config_from_json(const std::string& text);
TrainConfig load_config(const std::string& path);

/// Hash over every config field.
std::string config_hash(const TrainConfig& config);

/// The six component ablations.
const std::vector<std::string>& ablation_variants();
/// Copy of `base` with the named switch applied. Throws ConfigError listing
/// the valid names for anything else.
TrainConfig apply_ablation(const TrainConfig& base, std::string_view variant);

}  // namespace diffgt
