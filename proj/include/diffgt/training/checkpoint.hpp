#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "diffgt/model/denoiser.hpp"
#include "diffgt/training/config.hpp"

namespace diffgt {

/// Trained parameters plus everything needed to reproduce inference.
struct ModelState {
  TrainConfig config;
  ParamSet params;
  std::string dataset_hash;
  std::size_t best_epoch = 0;

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

/// Binary container: "DIFFGTCK", u32 version, u64 header length, a JSON header
/// (config, config hash, dataset hash, β schedule, parameter index) and the
/// parameter values as little-endian doubles in index order.
std::string checkpoint_bytes(const ModelState& state);
ModelState checkpoint_from_bytes(const std::string& bytes);

void save_checkpoint(const ModelState& state, const std::string& path);
/// Throws IoError for unreadable or malformed files and IntegrityError when
/// the stored config hash does not match the stored config.
ModelState load_checkpoint(const std::string& path);

}  // namespace diffgt
