#include "diffgt/training/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "diffgt/error.hpp"
#include "diffgt/graph/bundle.hpp"

namespace diffgt {
namespace {

using nlohmann::ordered_json;

constexpr int kConfigVersion = 1;

ordered_json to_json(const TrainConfig& c) {
  return ordered_json{
      {"version", kConfigVersion},
      {"seed", c.seed},
      {"dim", c.model.dim},
      {"encoder_layers", c.model.encoder_layers},
      {"denoiser_layers", c.model.denoiser_layers},
      {"k_lin", c.model.k_lin},
      {"attention", to_string(c.model.attention)},
      {"denoiser", to_string(c.model.denoiser)},
      {"use_condition", c.model.use_condition},
      {"steps", c.steps},
      {"beta_start", c.beta_start},
      {"beta_end", c.beta_end},
      {"reverse_samples", c.reverse_samples},
      {"noise", to_string(c.noise)},
      {"learning_rate", c.learning_rate},
      {"batch_size", c.batch_size},
      {"max_epochs", c.max_epochs},
      {"patience", c.patience},
      {"lambda_diff", c.weights.diffusion},
      {"lambda_cl", c.weights.contrastive},
      {"temperature", c.weights.temperature},
      {"use_side", c.use_side},
      {"top_n", c.top_n},
      {"score_with", to_string(c.score_with)},
      {"inference", to_string(c.inference)},
      {"ablation", c.ablation},
  };
}

template <typename T>
void read(const ordered_json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const ordered_json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::string read_string(const ordered_json& j, const char* key, std::string fallback) {
  read(j, key, fallback);
  return fallback;
}

}  // namespace

std::string_view to_string(ScoreSource source) {
  return source == ScoreSource::kDenoised ? "denoised" : "encoder";
}

ScoreSource score_source_from_string(std::string_view name) {
  if (name == "denoised") return ScoreSource::kDenoised;
  if (name == "encoder") return ScoreSource::kEncoder;
  throw ConfigError("unknown score_with '" + std::string(name) + "' (expected denoised|encoder)");
}

std::string_view to_string(InferenceMode mode) {
  return mode == InferenceMode::kSingleStep ? "single" : "chain";
}

InferenceMode inference_mode_from_string(std::string_view name) {
  if (name == "single") return InferenceMode::kSingleStep;
  if (name == "chain") return InferenceMode::kChain;
  throw ConfigError("unknown inference '" + std::string(name) + "' (expected single|chain)");
}

void validate(const TrainConfig& c) {
  if (c.model.dim == 0) throw ConfigError("dim must be positive");
  if (c.model.k_lin == 0) throw ConfigError("k_lin must be positive");
  if (c.steps == 0) throw ConfigError("steps (T) must be positive");
  if (!(c.beta_start > 0 && c.beta_start <= c.beta_end && c.beta_end < 1)) {
    throw ConfigError("need 0 < beta_start <= beta_end < 1");
  }
  if (c.reverse_samples < 1 || c.reverse_samples > c.steps) throw ConfigError("reverse_samples must lie in [1, steps]");
  if (!(c.learning_rate >= 0)) throw ConfigError("learning_rate must be non-negative");
  if (c.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (c.max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (c.patience == 0) throw ConfigError("patience must be positive");
  if (!(c.weights.diffusion >= 0) || !(c.weights.contrastive >= 0)) throw ConfigError("loss weights must be >= 0");
  if (!(c.weights.temperature > 0)) throw ConfigError("temperature must be > 0");
}

std::string config_to_json(const TrainConfig& config) { return to_json(config).dump(); }

TrainConfig config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const ordered_json reference = to_json(TrainConfig{});
  for (const auto& [key, _] : j.items()) {
    if (!reference.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  int version = kConfigVersion;
  read(j, "version", version);
  if (version != kConfigVersion) throw ConfigError("unsupported config version " + std::to_string(version));

  TrainConfig c;
  read(j, "seed", c.seed);
  read(j, "dim", c.model.dim);
  read(j, "encoder_layers", c.model.encoder_layers);
  read(j, "denoiser_layers", c.model.denoiser_layers);
  read(j, "k_lin", c.model.k_lin);
  c.model.attention = attention_kind_from_string(read_string(j, "attention", "linear"));
  c.model.denoiser = denoiser_kind_from_string(read_string(j, "denoiser", "transformer"));
  read(j, "use_condition", c.model.use_condition);
  read(j, "steps", c.steps);
  read(j, "beta_start", c.beta_start);
  read(j, "beta_end", c.beta_end);
  read(j, "reverse_samples", c.reverse_samples);
  c.noise = noise_mode_from_string(read_string(j, "noise", "directional"));
  read(j, "learning_rate", c.learning_rate);
  read(j, "batch_size", c.batch_size);
  read(j, "max_epochs", c.max_epochs);
  read(j, "patience", c.patience);
  read(j, "lambda_diff", c.weights.diffusion);
  read(j, "lambda_cl", c.weights.contrastive);
  read(j, "temperature", c.weights.temperature);
  read(j, "use_side", c.use_side);
  read(j, "top_n", c.top_n);
  c.score_with = score_source_from_string(read_string(j, "score_with", "denoised"));
  c.inference = inference_mode_from_string(read_string(j, "inference", "single"));
  read(j, "ablation", c.ablation);
  validate(c);
  return c;
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json(text.str());
}

std::string config_hash(const TrainConfig& config) { return fnv1a_hex(config_to_json(config)); }

const std::vector<std::string>& ablation_variants() {
  static const std::vector<std::string> names = {"-Direction", "-Condition", "-Transformer", "-Side", "-CL", "-DiffL"};
  return names;
}

TrainConfig apply_ablation(const TrainConfig& base, std::string_view variant) {
  TrainConfig c = base;
  if (variant == "-Direction") {
    c.noise = NoiseMode::kIsotropic;
  } else if (variant == "-Condition") {
    c.model.use_condition = false;
  } else if (variant == "-Transformer") {
    c.model.denoiser = DenoiserKind::kWeightedMatrix;
  } else if (variant == "-Side") {
    c.use_side = false;
  } else if (variant == "-CL") {
    c.weights.contrastive = 0.0;
  } else if (variant == "-DiffL") {
    c.weights.diffusion = 0.0;
  } else {
    std::string valid;
    for (const auto& n : ablation_variants()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown ablation variant '" + std::string(variant) + "'; valid: " + valid);
  }
  c.ablation = std::string(variant);
  return c;
}

}  // namespace diffgt
