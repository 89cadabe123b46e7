#pragma once

#include <cstddef>
#include <string_view>

namespace diffgt {

enum class AttentionKind { kLinear, kFull };
enum class DenoiserKind { kTransformer, kWeightedMatrix };

std::string_view to_string(AttentionKind kind);
std::string_view to_string(DenoiserKind kind);
AttentionKind attention_kind_from_string(std::string_view name);
DenoiserKind denoiser_kind_from_string(std::string_view name);

struct ModelConfig {
  std::size_t dim = 64;
  std::size_t encoder_layers = 2;
  std::size_t denoiser_layers = 2;
  /// Length keys/values are compressed to; capped at the token count.
  std::size_t k_lin = 64;
  AttentionKind attention = AttentionKind::kLinear;
  DenoiserKind denoiser = DenoiserKind::kTransformer;
  bool use_condition = true;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

}  // namespace diffgt
