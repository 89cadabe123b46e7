#include "diffgt/diffusion/schedule.hpp"

#include <string>

#include "diffgt/error.hpp"

namespace diffgt {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
  if (betas_.empty()) throw ConfigError("noise schedule needs at least one step");
  double running = 1.0;
  alpha_bars_.reserve(betas_.size());
  for (double b : betas_) {
    if (!(b > 0.0 && b < 1.0)) throw ConfigError("beta " + std::to_string(b) + " outside (0, 1)");
    running *= 1.0 - b;
    alpha_bars_.push_back(running);
  }
}

void NoiseSchedule::check_step(std::size_t t) const {
  if (t < 1 || t > betas_.size()) {
    throw StepError("step " + std::to_string(t) + " outside [1, " + std::to_string(betas_.size()) + "]");
  }
}

double NoiseSchedule::beta(std::size_t t) const {
  check_step(t);
  return betas_[t - 1];
}

double NoiseSchedule::alpha(std::size_t t) const { return 1.0 - beta(t); }

double NoiseSchedule::alpha_bar(std::size_t t) const {
  if (t == 0) return 1.0;
  check_step(t);
  return alpha_bars_[t - 1];
}

NoiseSchedule make_schedule(std::size_t steps, double beta_start, double beta_end) {
  if (steps < 1) throw ConfigError("diffusion needs T >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw ConfigError("need 0 < beta_start <= beta_end < 1, got " + std::to_string(beta_start) + ", " +
                      std::to_string(beta_end));
  }
  std::vector<double> betas(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    betas[i] = beta_start + (beta_end - beta_start) * frac;
  }
  return NoiseSchedule(std::move(betas));
}

}  // namespace diffgt
