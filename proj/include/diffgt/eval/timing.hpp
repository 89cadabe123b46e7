#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diffgt/graph/bundle.hpp"
#include "diffgt/training/checkpoint.hpp"

namespace diffgt {

/// The five diffusion variants compared for cost.
const std::vector<std::string>& timing_variants();

struct TimingSetup {
  std::size_t nodes = 1000;  ///< half users, half items
  std::size_t steps = 50;    ///< T
  std::size_t samples = 5;   ///< K
  std::size_t dim = 64;
  std::size_t encoder_layers = 2;
  std::size_t denoiser_layers = 2;
  std::size_t k_lin = 64;
  std::size_t degree = 10;  ///< interactions per synthetic user
  std::size_t repeats = 3;  ///< each time is the minimum over repeats
  std::uint64_t seed = 7;
};

struct TimingReport {
  std::string variant;
  double forward_seconds = 0.0;
  double reverse_seconds = 0.0;
  std::optional<double> recall;
  std::optional<double> ndcg;
};

/// Times every named variant on one seeded synthetic bipartite graph:
///   discrete             T edge-chain steps, re-encoding after each; T full-attention reverse steps
///   continuous           T encode+diffuse steps; T full-attention reverse steps
///   continuous-linear    as continuous with linear attention
///   continuous-sampling  as continuous with K sampled reverse steps
///   DiffGT               linear attention and K sampled reverse steps
/// Throws ConfigError for unknown variant names.
std::vector<TimingReport> timing_harness(const TimingSetup& setup, const std::vector<std::string>& variants);

/// Reverse-process wall time only, for scaling measurements.
double reverse_seconds(const TimingSetup& setup, const std::string& variant);

/// Fills recall/ndcg@k for the continuous variants by ranking with the
/// checkpoint under each variant's attention and reverse-step settings; the
/// discrete variant has no embedding-level model and stays empty.
void attach_metrics(std::vector<TimingReport>& reports, const ModelState& state, const DatasetBundle& bundle,
                    std::size_t k = 20);

std::string timing_to_csv(const std::vector<TimingReport>& reports);
std::string timing_to_table(const std::vector<TimingReport>& reports);

}  // namespace diffgt
