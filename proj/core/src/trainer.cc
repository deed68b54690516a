#include "crossfire/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "crossfire/error.h"
#include "crossfire/layers.h"
#include "crossfire/rng.h"

namespace crossfire::nn {
namespace {

// Gradients are summed per fixed-size chunk and the chunks are reduced in
// index order, so the result is independent of the worker count.
constexpr std::size_t kChunk = 4;
constexpr std::uint64_t kSplitStream = 0x5eed'0001;
constexpr std::uint64_t kEpochStream = 0x5eed'0002;

struct ChunkResult {
  std::vector<Tensor> grads;
  double loss = 0.0;
};

void ZeroAll(std::vector<Tensor>& tensors) {
  for (Tensor& t : tensors) t.Fill(0.0);
}

int ResolveThreads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

void ValidateTrainConfig(const TrainConfig& config) {
  if (config.batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (config.patience < 1) throw ConfigError("train.patience must be >= 1");
  if (config.max_epochs < 1) throw ConfigError("train.max_epochs must be >= 1");
  if (!(config.validation_fraction >= 0.0 && config.validation_fraction < 1.0)) {
    throw ConfigError("train.validation_fraction must lie in [0, 1)");
  }
  if (!(config.learning_rate >= 0.0)) {
    throw ConfigError("train.learning_rate must be >= 0");
  }
  if (config.threads < 0) throw ConfigError("train.threads must be >= 0");
}

double MeanLoss(const Trainable& model, std::span<const Example> data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const Example& ex : data) {
    total += BceLoss(model.Predict(ex.input), ex.label).loss;
  }
  return total / static_cast<double>(data.size());
}

TrainResult Train(Trainable& model, std::span<const Example> data,
                  const TrainConfig& config) {
  ValidateTrainConfig(config);
  if (data.empty()) throw ConfigError("train: dataset is empty");

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(MixSeed(config.seed, kSplitStream));
  Shuffle(order, split_rng);
  const auto n_val = static_cast<std::size_t>(
      std::ceil(config.validation_fraction * static_cast<double>(data.size())));
  if (n_val >= data.size()) {
    throw ConfigError("train: validation split leaves no training examples");
  }
  std::vector<Example> validation;
  validation.reserve(n_val);
  for (std::size_t i = 0; i < n_val; ++i) validation.push_back(data[order[i]]);
  std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());

  std::vector<Tensor*> params = model.Parameters();
  const std::vector<const Tensor*> const_params(params.begin(), params.end());
  AdamState adam(const_params, AdamConfig{.learning_rate = config.learning_rate});

  auto zero_grads = [&] {
    std::vector<Tensor> g;
    g.reserve(params.size());
    for (const Tensor* p : params) g.push_back(Tensor::ZerosLike(*p));
    return g;
  };
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  std::vector<ChunkResult> chunks((batch + kChunk - 1) / kChunk);
  for (ChunkResult& c : chunks) c.grads = zero_grads();
  std::vector<Tensor> batch_grads = zero_grads();
  const int threads = ResolveThreads(config.threads);

  TrainResult result;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_params;
  for (const Tensor* p : params) best_params.push_back(*p);
  int since_best = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    Rng epoch_rng(MixSeed(config.seed, kEpochStream, static_cast<std::uint64_t>(epoch)));
    Shuffle(train_idx, epoch_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train_idx.size(); start += batch) {
      const std::size_t end = std::min(train_idx.size(), start + batch);
      const std::size_t n_chunks = (end - start + kChunk - 1) / kChunk;
      auto run_chunk = [&](std::size_t c) {
        ChunkResult& chunk = chunks[c];
        ZeroAll(chunk.grads);
        chunk.loss = 0.0;
        const std::size_t lo = start + c * kChunk;
        const std::size_t hi = std::min(end, lo + kChunk);
        for (std::size_t k = lo; k < hi; ++k) {
          const Example& ex = data[train_idx[k]];
          chunk.loss += model.AccumulateGradient(ex.input, ex.label, chunk.grads);
        }
      };
      const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n_chunks);
      if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
      } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            for (std::size_t c = w; c < n_chunks; c += workers) run_chunk(c);
          });
        }
      }
      ZeroAll(batch_grads);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t c = 0; c < n_chunks; ++c) {
        epoch_loss += chunks[c].loss;
        for (std::size_t p = 0; p < batch_grads.size(); ++p) {
          double* dst = batch_grads[p].data();
          const double* src = chunks[c].grads[p].data();
          for (std::size_t k = 0; k < batch_grads[p].size(); ++k) dst[k] += src[k];
        }
      }
      for (Tensor& g : batch_grads) {
        for (double& v : g.values()) v *= scale;
      }
      AdamStep(params, batch_grads, adam);
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(train_idx.size());
    record.val_loss = validation.empty() ? record.train_loss
                                         : MeanLoss(model, validation);
    result.history.push_back(record);

    if (record.val_loss < best_loss) {
      best_loss = record.val_loss;
      result.best_epoch = epoch;
      for (std::size_t p = 0; p < params.size(); ++p) best_params[p] = *params[p];
      since_best = 0;
    } else if (++since_best >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }
  for (std::size_t p = 0; p < params.size(); ++p) *params[p] = best_params[p];
  return result;
}

}  // namespace crossfire::nn
