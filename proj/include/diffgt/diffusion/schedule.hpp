#pragma once

#include <cstddef>
#include <vector>

namespace diffgt {

/// β₁..β_T with α_t = 1 − β_t and ᾱ_t = Π_{s≤t} α_s. Steps are 1-based;
/// ᾱ₀ ≡ 1.
class NoiseSchedule {
 public:
  /// Throws ConfigError unless every β lies in (0, 1).
  explicit NoiseSchedule(std::vector<double> betas);

  std::size_t steps() const { return betas_.size(); }
  double beta(std::size_t t) const;
  double alpha(std::size_t t) const;
  double alpha_bar(std::size_t t) const;
  const std::vector<double>& betas() const { return betas_; }

 private:
  void check_step(std::size_t t) const;

  std::vector<double> betas_;
  std::vector<double> alpha_bars_;
};

/// β linearly interpolated from beta_start (t = 1) to beta_end (t = T).
/// Throws ConfigError unless 0 < beta_start ≤ beta_end < 1 and T ≥ 1.
NoiseSchedule make_schedule(std::size_t steps, double beta_start, double beta_end);

inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;

}  // namespace diffgt
