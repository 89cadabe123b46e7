#include "diffgt/model/config.hpp"

#include <string>

#include "diffgt/error.hpp"

namespace diffgt {

std::string_view to_string(AttentionKind kind) { return kind == AttentionKind::kLinear ? "linear" : "full"; }

std::string_view to_string(DenoiserKind kind) {
  return kind == DenoiserKind::kTransformer ? "transformer" : "weighted_matrix";
}

AttentionKind attention_kind_from_string(std::string_view name) {
  if (name == "linear") return AttentionKind::kLinear;
  if (name == "full") return AttentionKind::kFull;
  throw ConfigError("unknown attention '" + std::string(name) + "' (expected linear|full)");
}

DenoiserKind denoiser_kind_from_string(std::string_view name) {
  if (name == "transformer") return DenoiserKind::kTransformer;
  if (name == "weighted_matrix") return DenoiserKind::kWeightedMatrix;
  throw ConfigError("unknown denoiser '" + std::string(name) + "' (expected transformer|weighted_matrix)");
}

}  // namespace diffgt
