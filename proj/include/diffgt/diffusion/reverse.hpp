#pragma once

#include <cstddef>
#include <vector>

#include "diffgt/diffusion/schedule.hpp"
#include "diffgt/numerics/matrix.hpp"
#include "diffgt/numerics/random.hpp"

namespace diffgt {

/// Coefficients of the Gaussian posterior q(x_s | x_t, x₀) for s < t:
/// mean = x0_coef·x̂₀ + xt_coef·x_t.
struct PosteriorCoefficients {
  double x0_coef = 0.0;
  double xt_coef = 0.0;
  double variance = 0.0;
};

/// One-step posterior (s = t − 1):
///   x0_coef = √ᾱ_{t−1}·β_t / (1 − ᾱ_t)
///   xt_coef = √α_t·(1 − ᾱ_{t−1}) / (1 − ᾱ_t)
///   variance = (1 − ᾱ_{t−1}) / (1 − ᾱ_t) · β_t
/// At t = 1 this collapses to (1, 0, 0). Throws StepError outside [1, T].
PosteriorCoefficients posterior_coefficients(const NoiseSchedule& schedule, std::size_t t);

/// Posterior for a jump from t down to any s in [0, t); equals the one-step
/// form when s = t − 1.
PosteriorCoefficients posterior_coefficients(const NoiseSchedule& schedule, std::size_t t, std::size_t s);

struct PosteriorMean {
  Matrix mean;
  double variance = 0.0;
};

PosteriorMean reverse_posterior_mean(const Matrix& x_t, const Matrix& x0_hat, std::size_t t,
                                     const NoiseSchedule& schedule);

PosteriorMean posterior_mean_between(const Matrix& x_t, const Matrix& x0_hat, std::size_t t, std::size_t s,
                                     const NoiseSchedule& schedule);

/// K distinct steps drawn uniformly from [1, T], sorted descending.
/// Throws ConfigError unless 1 ≤ K ≤ T.
std::vector<std::size_t> sample_reverse_steps(std::size_t steps, std::size_t samples, RandomSource& rng);

}  // namespace diffgt
