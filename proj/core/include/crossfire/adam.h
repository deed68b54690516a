#ifndef CROSSFIRE_ADAM_H
#define CROSSFIRE_ADAM_H

#include <cstdint>
#include <span>
#include <vector>

#include "crossfire/tensor.h"

namespace crossfire::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  AdamState() = default;
  // Zero moments shaped like each parameter.
  AdamState(std::span<const Tensor* const> params, AdamConfig config);

  const AdamConfig& config() const { return config_; }
  std::int64_t step_count() const { return step_count_; }
  const std::vector<Tensor>& first_moment() const { return first_; }
  const std::vector<Tensor>& second_moment() const { return second_; }

 private:
  friend void AdamStep(std::span<Tensor* const>, std::span<const Tensor>,
                       AdamState&);
  AdamConfig config_;
  std::int64_t step_count_ = 0;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
};

// One bias-corrected Adam update of every parameter, in place.
void AdamStep(std::span<Tensor* const> params, std::span<const Tensor> grads,
              AdamState& state);

}  // namespace crossfire::nn

#endif  // CROSSFIRE_ADAM_H
