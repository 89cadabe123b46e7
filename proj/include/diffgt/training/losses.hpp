#pragma once

#include <span>

#include "diffgt/numerics/matrix.hpp"
#include "diffgt/numerics/tape.hpp"
#include "diffgt/training/config.hpp"

namespace diffgt {

/// mean −ln σ(s⁺ − s⁻) over aligned n×1 columns.
Var bpr_loss(Var positive, Var negative);
double bpr_loss(std::span<const double> positive, std::span<const double> negative);

/// Mean squared entry difference between x₀ and x̂₀.
Var diffusion_loss(Var x0, Var x0_hat);
double diffusion_loss(const Matrix& x0, const Matrix& x0_hat);

/// InfoNCE over aligned rows: row r of `anchors` is pulled towards row r of
/// `positives` and pushed from every other row of `positives` (the positive
/// stays in the denominator). Rows are L2-normalised first. Throws
/// ConfigError when τ ≤ 0.
Var contrastive_loss(Var anchors, Var positives, double temperature);
double contrastive_loss(const Matrix& anchors, const Matrix& positives, double temperature);

struct LossParts {
  double bpr = 0.0;
  double diffusion = 0.0;
  double contrastive = 0.0;
};

/// L_bpr + λ₁·L_diff + λ₂·L_cl; a zero weight drops its term entirely.
double total_loss(const LossParts& parts, const LossWeights& weights);
Var total_loss(Var bpr, Var diffusion, Var contrastive, const LossWeights& weights);

}  // namespace diffgt
