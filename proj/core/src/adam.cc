#include "crossfire/adam.h"

#include <cmath>

#include "crossfire/error.h"

namespace crossfire::nn {

AdamState::AdamState(std::span<const Tensor* const> params, AdamConfig config)
    : config_(config) {
  if (!(config.beta1 > 0.0 && config.beta1 < 1.0 && config.beta2 > 0.0 &&
        config.beta2 < 1.0)) {
    throw ConfigError("adam: beta1 and beta2 must lie in (0, 1)");
  }
  first_.reserve(params.size());
  second_.reserve(params.size());
  for (const Tensor* p : params) {
    first_.push_back(Tensor::ZerosLike(*p));
    second_.push_back(Tensor::ZerosLike(*p));
  }
}

void AdamStep(std::span<Tensor* const> params, std::span<const Tensor> grads,
              AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_.size()) {
    throw ShapeError("adam: " + std::to_string(params.size()) +
                     " parameters, " + std::to_string(grads.size()) +
                     " gradients, " + std::to_string(state.first_.size()) +
                     " moment slots");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    RequireSameShape(*params[i], grads[i], "adam gradient");
    RequireSameShape(*params[i], state.first_[i], "adam moment");
  }
  const AdamConfig& c = state.config_;
  ++state.step_count_;
  const double t = static_cast<double>(state.step_count_);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double* p = params[i]->data();
    const double* g = grads[i].data();
    double* m = state.first_[i].data();
    double* v = state.second_[i].data();
    for (std::size_t k = 0; k < grads[i].size(); ++k) {
      m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
      v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      p[k] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace crossfire::nn
