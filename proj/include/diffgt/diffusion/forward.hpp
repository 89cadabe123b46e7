#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "diffgt/diffusion/schedule.hpp"
#include "diffgt/numerics/matrix.hpp"
#include "diffgt/numerics/random.hpp"

namespace diffgt {

enum class NoiseMode { kIsotropic, kDirectional };

std::string_view to_string(NoiseMode mode);
/// Throws ConfigError for anything but "isotropic" or "directional".
NoiseMode noise_mode_from_string(std::string_view name);

/// Noisy snapshot x_t = √ᾱ_t·x₀ + √(1−ᾱ_t)·noise. `condition` is filled by the
/// model when it conditions the denoiser.
struct DiffusionBatch {
  Matrix x_t;
  std::size_t t = 0;
  Matrix noise;
  Matrix condition;
};

/// sgn(x₀) ⊙ |μ + σ ⊙ ε| for a supplied standard-normal ε, with sgn(0) = +1.
/// μ and σ are per column.
Matrix directional_noise_from(const Matrix& x0, const Matrix& eps, std::span<const double> mu,
                              std::span<const double> sigma);

/// Same with ε drawn from `rng`.
Matrix directional_noise(const Matrix& x0, RandomSource& rng, std::span<const double> mu,
                         std::span<const double> sigma);

/// Noise of the requested kind. Directional noise uses the per-column
/// statistics of x₀ itself.
Matrix sample_noise(const Matrix& x0, NoiseMode mode, RandomSource& rng);

/// Throws StepError unless 1 ≤ t ≤ T.
DiffusionBatch forward_diffuse(const Matrix& x0, std::size_t t, const NoiseSchedule& schedule,
                               NoiseMode mode, RandomSource& rng);

/// x_t from explicit noise; used when the caller needs the noise beforehand.
Matrix interpolate(const Matrix& x0, const Matrix& noise, std::size_t t, const NoiseSchedule& schedule);

}  // namespace diffgt
