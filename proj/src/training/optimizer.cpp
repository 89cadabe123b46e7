#include "diffgt/training/optimizer.hpp"

#include <cmath>

namespace diffgt {

void Adam::step(ParamSet& params, const Gradients& grads) {
  ++t_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (auto& [name, value] : params) {
    if (!grads.contains(name)) continue;
    const Matrix& g = grads.at(name);
    auto [mit, mnew] = m_.try_emplace(name, value.rows(), value.cols());
    auto [vit, vnew] = v_.try_emplace(name, value.rows(), value.cols());
    auto m = mit->second.values();
    auto v = vit->second.values();
    auto p = value.values();
    auto gv = g.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * gv[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * gv[i] * gv[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

}  // namespace diffgt
