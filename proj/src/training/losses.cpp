#include "diffgt/training/losses.hpp"

#include "diffgt/error.hpp"

namespace diffgt {
namespace {

Matrix column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

}  // namespace

Var bpr_loss(Var positive, Var negative) {
  return ad::scale(ad::mean(ad::log_sigmoid(ad::sub(positive, negative))), -1.0);
}

double bpr_loss(std::span<const double> positive, std::span<const double> negative) {
  if (positive.size() != negative.size()) throw ShapeError("bpr_loss: score lists differ in length");
  Tape tape;
  return bpr_loss(tape.constant(column(positive)), tape.constant(column(negative))).value()(0, 0);
}

Var diffusion_loss(Var x0, Var x0_hat) { return ad::mse(x0, x0_hat); }

double diffusion_loss(const Matrix& x0, const Matrix& x0_hat) {
  Tape tape;
  return diffusion_loss(tape.constant(x0), tape.constant(x0_hat)).value()(0, 0);
}

Var contrastive_loss(Var anchors, Var positives, double temperature) {
  if (!(temperature > 0)) throw ConfigError("contrastive temperature must be > 0");
  if (!anchors.value().same_shape(positives.value())) {
    throw ShapeError("contrastive_loss: " + shape_string(anchors.value()) + " vs " + shape_string(positives.value()));
  }
  Var a = ad::l2_normalize_rows(anchors);
  Var p = ad::l2_normalize_rows(positives);
  const double inv_tau = 1.0 / temperature;
  Var logits = ad::scale(ad::matmul_nt(a, p), inv_tau);
  Var matched = ad::scale(ad::row_dot(a, p), inv_tau);
  return ad::mean(ad::sub(ad::logsumexp_rows(logits), matched));
}

double contrastive_loss(const Matrix& anchors, const Matrix& positives, double temperature) {
  Tape tape;
  return contrastive_loss(tape.constant(anchors), tape.constant(positives), temperature).value()(0, 0);
}

double total_loss(const LossParts& parts, const LossWeights& weights) {
  double total = parts.bpr;
  if (weights.diffusion != 0.0) total += weights.diffusion * parts.diffusion;
  if (weights.contrastive != 0.0) total += weights.contrastive * parts.contrastive;
  return total;
}

Var total_loss(Var bpr, Var diffusion, Var contrastive, const LossWeights& weights) {
  Var total = bpr;
  if (weights.diffusion != 0.0) total = ad::add(total, ad::scale(diffusion, weights.diffusion));
  if (weights.contrastive != 0.0) total = ad::add(total, ad::scale(contrastive, weights.contrastive));
  return total;
}

}  // namespace diffgt
