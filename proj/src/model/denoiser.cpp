#include "diffgt/model/denoiser.hpp"

#include <algorithm>
#include <cmath>

#include "diffgt/error.hpp"
#include "diffgt/model/encoder.hpp"

namespace diffgt {
namespace {

std::string layer_name(std::size_t layer, const char* part) {
  return "denoiser.l" + std::to_string(layer) + "." + part;
}

}  // namespace

void register_params(Tape& tape, const ParamSet& params) {
  for (const auto& [name, value] : params) tape.parameter(name, value);
}

Matrix step_embedding(std::size_t t, std::size_t dim) {
  Matrix row(1, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double pair = static_cast<double>(i / 2 * 2);
    const double freq = std::pow(10000.0, -pair / static_cast<double>(dim));
    row(0, i) = i % 2 == 0 ? std::sin(static_cast<double>(t) * freq) : std::cos(static_cast<double>(t) * freq);
  }
  return row;
}

std::size_t compressed_length(const ModelConfig& config, std::size_t tokens) {
  return std::max<std::size_t>(1, std::min(config.k_lin, tokens));
}

ParamSet init_denoiser_params(const ModelConfig& config, std::size_t tokens, RandomSource& rng) {
  const std::size_t d = config.dim;
  ParamSet p;
  Matrix in(2 * d, d);
  for (std::size_t i = 0; i < d; ++i) in(i, i) = 1.0;
  p["denoiser.in"] = std::move(in);
  p["denoiser.step"] = Matrix(d, d);
  if (config.denoiser == DenoiserKind::kWeightedMatrix) return p;
  for (std::size_t l = 0; l < config.denoiser_layers; ++l) {
    p[layer_name(l, "q")] = xavier_uniform(d, d, rng);
    p[layer_name(l, "k")] = xavier_uniform(d, d, rng);
    p[layer_name(l, "v")] = xavier_uniform(d, d, rng);
    p[layer_name(l, "o")] = Matrix(d, d);
    p[layer_name(l, "compress")] = xavier_uniform(compressed_length(config, tokens), tokens, rng);
  }
  p["denoiser.out"] = Matrix(d, d);
  return p;
}

Var denoise(Var x_t, Var condition, std::size_t t, const ModelConfig& config,
            std::vector<Matrix>* attention_trace) {
  Tape& tape = x_t.tape();
  const std::size_t d = config.dim;
  if (x_t.cols() != d) throw ShapeError("denoise: tokens are " + shape_string(x_t.value()) + ", dim " + std::to_string(d));
  if (!condition.value().same_shape(x_t.value())) {
    throw ShapeError("denoise: condition " + shape_string(condition.value()) + " vs tokens " + shape_string(x_t.value()));
  }
  Var cond = config.use_condition ? condition : tape.constant(Matrix(x_t.rows(), d));
  Var step = ad::matmul(tape.constant(step_embedding(t, d)), tape.param("denoiser.step"));
  Var h = ad::add_row(ad::matmul(ad::concat_cols(x_t, cond), tape.param("denoiser.in")), step);
  if (config.denoiser == DenoiserKind::kWeightedMatrix) return h;

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t l = 0; l < config.denoiser_layers; ++l) {
    Var q = ad::matmul(h, tape.param(layer_name(l, "q")));
    Var k = ad::matmul(h, tape.param(layer_name(l, "k")));
    Var v = ad::matmul(h, tape.param(layer_name(l, "v")));
    if (config.attention == AttentionKind::kLinear) {
      Var compress = tape.param(layer_name(l, "compress"));
      if (compress.cols() != x_t.rows()) {
        throw ShapeError("denoise: compression expects " + std::to_string(compress.cols()) + " tokens, got " +
                         std::to_string(x_t.rows()));
      }
      k = ad::matmul(compress, k);
      v = ad::matmul(compress, v);
    }
    Var weights = ad::softmax_rows(ad::scale(ad::matmul_nt(q, k), inv_sqrt_d));
    if (attention_trace) attention_trace->push_back(weights.value());
    h = ad::add(h, ad::matmul(ad::matmul(weights, v), tape.param(layer_name(l, "o"))));
  }
  return ad::add(h, ad::matmul(h, tape.param("denoiser.out")));
}

}  // namespace diffgt
