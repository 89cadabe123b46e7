#include "diffgt/diffusion/forward.hpp"

#include <cmath>
#include <string>

#include "diffgt/error.hpp"

namespace diffgt {

std::string_view to_string(NoiseMode mode) {
  return mode == NoiseMode::kIsotropic ? "isotropic" : "directional";
}

NoiseMode noise_mode_from_string(std::string_view name) {
  if (name == "isotropic") return NoiseMode::kIsotropic;
  if (name == "directional") return NoiseMode::kDirectional;
  throw ConfigError("unknown noise mode '" + std::string(name) + "' (expected isotropic|directional)");
}

Matrix directional_noise_from(const Matrix& x0, const Matrix& eps, std::span<const double> mu,
                              std::span<const double> sigma) {
  if (!x0.same_shape(eps)) throw ShapeError("directional noise: eps " + shape_string(eps) + " vs x0 " + shape_string(x0));
  if (mu.size() != x0.cols() || sigma.size() != x0.cols()) {
    throw ShapeError("directional noise: mu/sigma length must equal embedding dimension " +
                     std::to_string(x0.cols()));
  }
  for (double s : sigma)
    if (s < 0.0) throw ConfigError("directional noise: sigma must be non-negative");
  Matrix out(x0.rows(), x0.cols());
  for (std::size_t r = 0; r < x0.rows(); ++r) {
    for (std::size_t c = 0; c < x0.cols(); ++c) {
      const double magnitude = std::abs(mu[c] + sigma[c] * eps(r, c));
      out(r, c) = x0(r, c) < 0.0 ? -magnitude : magnitude;
    }
  }
  return out;
}

Matrix directional_noise(const Matrix& x0, RandomSource& rng, std::span<const double> mu,
                         std::span<const double> sigma) {
  const Matrix eps = standard_normal(rng, x0.rows(), x0.cols());
  return directional_noise_from(x0, eps, mu, sigma);
}

Matrix sample_noise(const Matrix& x0, NoiseMode mode, RandomSource& rng) {
  if (mode == NoiseMode::kIsotropic) return standard_normal(rng, x0.rows(), x0.cols());
  const ColumnStats stats = column_stats(x0);
  return directional_noise(x0, rng, stats.mean, stats.stddev);
}

Matrix interpolate(const Matrix& x0, const Matrix& noise, std::size_t t, const NoiseSchedule& schedule) {
  if (!x0.same_shape(noise)) throw ShapeError("forward diffusion: noise shape mismatch");
  if (t == 0) throw StepError("step 0 outside [1, T]");
  const double ab = schedule.alpha_bar(t);
  const double signal = std::sqrt(ab);
  const double spread = std::sqrt(1.0 - ab);
  Matrix out(x0.rows(), x0.cols());
  auto o = out.values();
  auto a = x0.values();
  auto n = noise.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = signal * a[i] + spread * n[i];
  return out;
}

DiffusionBatch forward_diffuse(const Matrix& x0, std::size_t t, const NoiseSchedule& schedule,
                               NoiseMode mode, RandomSource& rng) {
  if (t == 0) throw StepError("step 0 outside [1, T]");
  schedule.beta(t);
  DiffusionBatch batch;
  batch.t = t;
  batch.noise = sample_noise(x0, mode, rng);
  batch.x_t = interpolate(x0, batch.noise, t, schedule);
  return batch;
}

}  // namespace diffgt
