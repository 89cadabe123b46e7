#pragma once

#include <cstddef>

#include "diffgt/model/denoiser.hpp"
#include "diffgt/numerics/tape.hpp"

namespace diffgt {

/// Adaptive moment estimation with bias correction.
class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  /// Updates every entry of `params` that has a gradient.
  void step(ParamSet& params, const Gradients& grads);

  std::size_t steps_taken() const { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  std::size_t t_ = 0;
  ParamSet m_;
  ParamSet v_;
};

}  // namespace diffgt
