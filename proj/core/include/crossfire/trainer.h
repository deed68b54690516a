#ifndef CROSSFIRE_TRAINER_H
#define CROSSFIRE_TRAINER_H

#include <cstdint>
#include <span>
#include <vector>

#include "crossfire/adam.h"
#include "crossfire/tensor.h"

namespace crossfire::nn {

// A binary classifier with a sigmoid head that the trainer can fit.
class Trainable {
 public:
  virtual ~Trainable() = default;

  virtual std::vector<Tensor*> Parameters() = 0;
  virtual std::vector<const Tensor*> Parameters() const = 0;

  // Probability of the positive class.
  virtual double Predict(const Tensor& input) const = 0;

  // Adds the binary cross-entropy gradient for one example into `grads`
  // (same order and shapes as Parameters()) and returns the example's loss.
  virtual double AccumulateGradient(const Tensor& input, double label,
                                    std::span<Tensor> grads) const = 0;
};

struct Example {
  Tensor input;
  double label = 0.0;
};

struct TrainConfig {
  int max_epochs = 100;
  int batch_size = 32;
  int patience = 10;
  double validation_fraction = 0.2;
  std::uint64_t seed = 1;
  double learning_rate = 1e-3;
  // Worker threads for per-batch gradients; 0 picks hardware concurrency.
  // Results do not depend on this value.
  int threads = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  bool stopped_early = false;
};

void ValidateTrainConfig(const TrainConfig& config);

// Mini-batch Adam with early stopping on validation loss (training loss when
// validation_fraction is 0). Leaves the model at its best epoch's weights.
TrainResult Train(Trainable& model, std::span<const Example> data,
                  const TrainConfig& config);

// Mean binary cross-entropy over `data`.
double MeanLoss(const Trainable& model, std::span<const Example> data);

}  // namespace crossfire::nn

#endif  // CROSSFIRE_TRAINER_H
