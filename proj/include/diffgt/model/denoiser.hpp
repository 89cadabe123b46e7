#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "diffgt/model/config.hpp"
#include "diffgt/numerics/matrix.hpp"
#include "diffgt/numerics/random.hpp"
#include "diffgt/numerics/tape.hpp"

namespace diffgt {

/// Named trainable matrices, iterated in name order.
using ParamSet = std::map<std::string, Matrix>;

/// Registers every entry of `params` on `tape` under its name.
void register_params(Tape& tape, const ParamSet& params);

/// Sinusoidal embedding of step t as a 1×dim row.
Matrix step_embedding(std::size_t t, std::size_t dim);

/// Effective compressed length for `tokens` tokens.
std::size_t compressed_length(const ModelConfig& config, std::size_t tokens);

/// Denoiser parameters for a graph of `tokens` nodes:
///   denoiser.in    2d×d  tokens [x_t | c] → d; starts as [I; 0]
///   denoiser.step  d×d   step-embedding projection; starts at 0
///   denoiser.l<i>.{q,k,v}  d×d Xavier;  .o d×d starts at 0
///   denoiser.l<i>.compress k×N shared key/value compression (linear attention)
///   denoiser.out   d×d   residual output projection; starts at 0
/// The weighted-matrix denoiser keeps only `in` and `step`. With this
/// initialisation the denoiser returns x_t unchanged.
ParamSet init_denoiser_params(const ModelConfig& config, std::size_t tokens, RandomSource& rng);

/// x̂₀ for noisy tokens `x_t` (N×d) at step t. `condition` is N×d; it is
/// replaced by zeros when the config disables conditioning. Parameters are
/// looked up on the tape by name. When `attention_trace` is given, each
/// layer's attention weights are appended to it.
Var denoise(Var x_t, Var condition, std::size_t t, const ModelConfig& config,
            std::vector<Matrix>* attention_trace = nullptr);

}  // namespace diffgt
