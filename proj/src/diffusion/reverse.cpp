#include "diffgt/diffusion/reverse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "diffgt/error.hpp"

namespace diffgt {

PosteriorCoefficients posterior_coefficients(const NoiseSchedule& schedule, std::size_t t) {
  if (t < 1 || t > schedule.steps()) {
    throw StepError("posterior step " + std::to_string(t) + " outside [1, " + std::to_string(schedule.steps()) + "]");
  }
  if (t == 1) return {1.0, 0.0, 0.0};
  const double ab_t = schedule.alpha_bar(t);
  const double ab_prev = schedule.alpha_bar(t - 1);
  const double beta = schedule.beta(t);
  const double denom = 1.0 - ab_t;
  return {std::sqrt(ab_prev) * beta / denom, std::sqrt(schedule.alpha(t)) * (1.0 - ab_prev) / denom,
          (1.0 - ab_prev) / denom * beta};
}

PosteriorCoefficients posterior_coefficients(const NoiseSchedule& schedule, std::size_t t, std::size_t s) {
  if (t < 1 || t > schedule.steps() || s >= t) {
    throw StepError("posterior jump " + std::to_string(t) + " -> " + std::to_string(s) + " is invalid");
  }
  if (s + 1 == t) return posterior_coefficients(schedule, t);
  if (s == 0) return {1.0, 0.0, 0.0};
  const double ab_t = schedule.alpha_bar(t);
  const double ab_s = schedule.alpha_bar(s);
  const double ratio = ab_t / ab_s;
  const double denom = 1.0 - ab_t;
  return {std::sqrt(ab_s) * (1.0 - ratio) / denom, std::sqrt(ratio) * (1.0 - ab_s) / denom,
          (1.0 - ab_s) / denom * (1.0 - ratio)};
}

namespace {

PosteriorMean combine(const Matrix& x_t, const Matrix& x0_hat, const PosteriorCoefficients& c) {
  if (!x_t.same_shape(x0_hat)) throw ShapeError("posterior: x_t and x0_hat shapes differ");
  PosteriorMean out{Matrix(x_t.rows(), x_t.cols()), c.variance};
  auto o = out.mean.values();
  auto a = x0_hat.values();
  auto b = x_t.values();
  if (c.xt_coef == 0.0) {
    std::copy(a.begin(), a.end(), o.begin());
    return out;
  }
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = c.x0_coef * a[i] + c.xt_coef * b[i];
  return out;
}

}  // namespace

PosteriorMean reverse_posterior_mean(const Matrix& x_t, const Matrix& x0_hat, std::size_t t,
                                     const NoiseSchedule& schedule) {
  return combine(x_t, x0_hat, posterior_coefficients(schedule, t));
}

PosteriorMean posterior_mean_between(const Matrix& x_t, const Matrix& x0_hat, std::size_t t, std::size_t s,
                                     const NoiseSchedule& schedule) {
  return combine(x_t, x0_hat, posterior_coefficients(schedule, t, s));
}

std::vector<std::size_t> sample_reverse_steps(std::size_t steps, std::size_t samples, RandomSource& rng) {
  if (samples < 1 || samples > steps) {
    throw ConfigError("reverse samples K=" + std::to_string(samples) + " must lie in [1, T=" +
                      std::to_string(steps) + "]");
  }
  std::vector<std::size_t> pool(steps);
  std::iota(pool.begin(), pool.end(), std::size_t{1});
  // Partial Fisher–Yates: the first K slots end up a uniform K-subset.
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t j = i + rng.uniform_index(steps - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(samples);
  std::sort(pool.begin(), pool.end(), std::greater<>());
  return pool;
}

}  // namespace diffgt
