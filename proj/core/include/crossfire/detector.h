#ifndef CROSSFIRE_DETECTOR_H
#define CROSSFIRE_DETECTOR_H

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "crossfire/lstm.h"
#include "crossfire/scenario.h"
#include "crossfire/tensor.h"
#include "crossfire/trainer.h"

namespace crossfire::detect {

enum class Arch { kAnn, kCnn, kLstm };

std::string_view ArchName(Arch arch);
// Throws ConfigError for anything but ann, cnn or lstm.
Arch ParseArch(std::string_view name);

// Per-feature min-max statistics over 1 + 2L features: the timestamp, then
// (flow count, aggregate size) for each monitored link.
struct Normalization {
  std::vector<double> min;
  std::vector<double> max;

  static Normalization Fit(std::span<const sim::TrafficSample> samples);
  // Scaled to [0, 1] and clamped; a constant feature (min == max) maps to 0.
  double Scale(std::size_t feature, double value) const;

  bool operator==(const Normalization&) const = default;
};

struct AnnOptions {
  int hidden = 25;
  // Constant-zero input nodes appended after the link features. -1 selects
  // one node when 1 + 2L == 49, so 24 links give the 50-node input layer.
  int zero_pad = -1;
};

struct CnnOptions {
  int window = 10;
  int temporal_kernels = 8;
  int temporal_width = 3;
  int spatial_kernels = 8;
  int spatial_rows = 3;
  int dense_units = 16;
};

struct LstmOptions {
  int window = 32;
  int units = 32;
  int layers = 2;
};

struct DetectorOptions {
  AnnOptions ann;
  CnnOptions cnn;
  LstmOptions lstm;
  double threshold = 0.5;
};

enum class Verdict { kNormal, kAttack };

struct DetectorOutput {
  double probability = 0.0;
  Verdict verdict = Verdict::kNormal;
  double window_end_timestamp = 0.0;
};

// One of the three architectures plus the normalization fitted on its
// training data. Immutable once trained; Predict is safe from many threads.
//
//   ann:  [1 + 2L (+pad)] -> dense 25 relu -> dense 25 relu -> sigmoid
//   cnn:  [10 x 2L] -> K1 temporal 1 x kt kernels, relu
//         -> K2 spatial kr x (full width) kernels over the K1 maps, relu
//         -> dense relu -> sigmoid
//   lstm: [32 x 2L] -> stacked LSTM (32 units each) -> sigmoid on last h
class DetectorModel final : public nn::Trainable {
 public:
  DetectorModel(Arch arch, std::size_t n_links, const DetectorOptions& options,
                std::uint64_t seed);

  Arch arch() const { return arch_; }
  std::size_t n_links() const { return n_links_; }
  const DetectorOptions& options() const { return options_; }
  double threshold() const { return options_.threshold; }
  // Samples consumed per classification: 1, cnn.window or lstm.window.
  std::size_t window_length() const;
  nn::Shape input_shape() const;
  std::size_t ann_zero_pad() const;

  const Normalization& normalization() const { return normalization_; }
  void set_normalization(Normalization normalization);

  // `key=value` pairs describing the architecture (model file line 2).
  std::vector<std::pair<std::string, std::string>> Hyperparameters() const;
  std::vector<std::string> ParameterNames() const;

  std::vector<nn::Tensor*> Parameters() override;
  std::vector<const nn::Tensor*> Parameters() const override;
  double Predict(const nn::Tensor& input) const override;
  double AccumulateGradient(const nn::Tensor& input, double label,
                            std::span<nn::Tensor> grads) const override;

 private:
  struct Ann {
    nn::Tensor w1, b1, w2, b2, head_w, head_b;
  };
  struct Cnn {
    nn::Tensor temporal_k, temporal_b, spatial_k, spatial_b, dense_w, dense_b,
        head_w, head_b;
  };
  struct Lstm {
    std::vector<nn::LstmParams> layers;
    nn::Tensor head_w, head_b;
  };

  void CheckInput(const nn::Tensor& input) const;

  Arch arch_;
  std::size_t n_links_;
  DetectorOptions options_;
  Normalization normalization_;
  std::variant<Ann, Cnn, Lstm> net_;
};

// Freshly initialized detector; deterministic per seed. Throws ConfigError
// for L < 1 or kernel sizes that do not fit.
DetectorModel BuildDetector(Arch arch, std::size_t n_links, std::uint64_t seed,
                            const DetectorOptions& options = {});

// Model input for the last window_length() samples of `samples`, scaled with
// the model's normalization. Throws ConfigError when too few samples and
// IncompatibleError when the link count differs from the model's.
nn::Tensor Featurize(std::span<const sim::TrafficSample> samples,
                     const DetectorModel& model);

// Probability and thresholded verdict. Throws ShapeError on a malformed input.
DetectorOutput Classify(const DetectorModel& model, const nn::Tensor& input,
                        double window_end_timestamp = 0.0);

// Ground truth of a window: attack iff at least half its samples are attack.
bool WindowLabel(std::span<const sim::TrafficSample> window);

struct Window {
  std::size_t end = 0;  // index of the last sample
  double end_timestamp = 0.0;
  bool attack = false;
};

// Every stride-1 window of `length` samples, in stream order.
std::vector<Window> MakeWindows(std::span<const sim::TrafficSample> samples,
                                std::size_t length);

// Featurized, labeled training examples for the given windows.
std::vector<nn::Example> MakeExamples(std::span<const sim::TrafficSample> samples,
                                      std::span<const Window> windows,
                                      const DetectorModel& model);

}  // namespace crossfire::detect

#endif  // CROSSFIRE_DETECTOR_H
