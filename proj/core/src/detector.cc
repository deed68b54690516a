#include "crossfire/detector.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <type_traits>

#include "crossfire/error.h"
#include "crossfire/layers.h"
#include "crossfire/rng.h"

namespace crossfire::detect {
namespace {

using nn::Shape;
using nn::Tensor;

void GlorotUniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.values()) v = rng.Uniform(-limit, limit);
}

std::size_t Positive(int value, const char* name) {
  if (value < 1) throw ConfigError(std::string(name) + " must be >= 1");
  return static_cast<std::size_t>(value);
}

double HeadLogit(const Tensor& features, const Tensor& w, const Tensor& b) {
  return nn::DenseForward(features, w, b)[0];
}

}  // namespace

std::string_view ArchName(Arch arch) {
  switch (arch) {
    case Arch::kAnn:
      return "ann";
    case Arch::kCnn:
      return "cnn";
    case Arch::kLstm:
      return "lstm";
  }
  return "?";
}

Arch ParseArch(std::string_view name) {
  if (name == "ann") return Arch::kAnn;
  if (name == "cnn") return Arch::kCnn;
  if (name == "lstm") return Arch::kLstm;
  throw ConfigError("unknown architecture '" + std::string(name) +
                    "' (expected ann, cnn or lstm)");
}

Normalization Normalization::Fit(std::span<const sim::TrafficSample> samples) {
  if (samples.empty()) throw ConfigError("normalization: no samples");
  const std::size_t n_links = samples.front().per_link.size();
  Normalization n;
  n.min.assign(1 + 2 * n_links, 0.0);
  n.max.assign(1 + 2 * n_links, 0.0);
  bool first = true;
  for (const sim::TrafficSample& s : samples) {
    if (s.per_link.size() != n_links) {
      throw IncompatibleError("normalization: samples disagree on link count");
    }
    auto update = [&](std::size_t f, double v) {
      if (first) {
        n.min[f] = n.max[f] = v;
      } else {
        n.min[f] = std::min(n.min[f], v);
        n.max[f] = std::max(n.max[f], v);
      }
    };
    update(0, s.timestamp);
    for (std::size_t i = 0; i < n_links; ++i) {
      update(1 + 2 * i, s.per_link[i].flow_count);
      update(2 + 2 * i, s.per_link[i].aggregate_size);
    }
    first = false;
  }
  return n;
}

double Normalization::Scale(std::size_t feature, double value) const {
  const double lo = min.at(feature), hi = max.at(feature);
  if (!(hi > lo)) return 0.0;
  return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

DetectorModel::DetectorModel(Arch arch, std::size_t n_links,
                             const DetectorOptions& options, std::uint64_t seed)
    : arch_(arch), n_links_(n_links), options_(options) {
  if (n_links < 1) throw ConfigError("detector needs at least one monitored link");
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) {
    throw ConfigError("detector threshold must lie in (0, 1)");
  }
  Rng rng(MixSeed(seed, 0xde7ec7));
  const std::size_t features = 2 * n_links;
  switch (arch) {
    case Arch::kAnn: {
      const std::size_t hidden = Positive(options.ann.hidden, "ann.hidden");
      if (options_.ann.zero_pad < 0) options_.ann.zero_pad = 1 + features == 49 ? 1 : 0;
      const std::size_t in = 1 + features + static_cast<std::size_t>(options_.ann.zero_pad);
      Ann net{Tensor({hidden, in}), Tensor({hidden}), Tensor({hidden, hidden}),
              Tensor({hidden}), Tensor({1, hidden}), Tensor({1})};
      GlorotUniform(net.w1, in, hidden, rng);
      GlorotUniform(net.w2, hidden, hidden, rng);
      GlorotUniform(net.head_w, hidden, 1, rng);
      net_ = std::move(net);
      break;
    }
    case Arch::kCnn: {
      const CnnOptions& o = options.cnn;
      const std::size_t window = Positive(o.window, "cnn.window");
      const std::size_t k1 = Positive(o.temporal_kernels, "cnn.temporal_kernels");
      const std::size_t kt = Positive(o.temporal_width, "cnn.temporal_width");
      const std::size_t k2 = Positive(o.spatial_kernels, "cnn.spatial_kernels");
      const std::size_t kr = Positive(o.spatial_rows, "cnn.spatial_rows");
      const std::size_t dense = Positive(o.dense_units, "cnn.dense_units");
      if (kt > features || kr > window) {
        throw ConfigError("cnn kernels do not fit a " + std::to_string(window) +
                          " x " + std::to_string(features) + " window");
      }
      const std::size_t width = features - kt + 1;
      const std::size_t flat = k2 * (window - kr + 1);
      Cnn net{Tensor({k1, 1, 1, kt}),        Tensor({k1}),
              Tensor({k2, k1, kr, width}),   Tensor({k2}),
              Tensor({dense, flat}),         Tensor({dense}),
              Tensor({1, dense}),            Tensor({1})};
      GlorotUniform(net.temporal_k, kt, k1 * kt, rng);
      GlorotUniform(net.spatial_k, k1 * kr * width, k2 * kr * width, rng);
      GlorotUniform(net.dense_w, flat, dense, rng);
      GlorotUniform(net.head_w, dense, 1, rng);
      net_ = std::move(net);
      break;
    }
    case Arch::kLstm: {
      const LstmOptions& o = options.lstm;
      Positive(o.window, "lstm.window");
      const std::size_t units = Positive(o.units, "lstm.units");
      const std::size_t layers = Positive(o.layers, "lstm.layers");
      Lstm net;
      for (std::size_t l = 0; l < layers; ++l) {
        net.layers.emplace_back(l == 0 ? features : units, units);
        net.layers.back().Initialize(rng);
      }
      net.head_w = Tensor({1, units});
      net.head_b = Tensor({1});
      GlorotUniform(net.head_w, units, 1, rng);
      net_ = std::move(net);
      break;
    }
  }
}

std::size_t DetectorModel::window_length() const {
  switch (arch_) {
    case Arch::kAnn:
      return 1;
    case Arch::kCnn:
      return static_cast<std::size_t>(options_.cnn.window);
    case Arch::kLstm:
      return static_cast<std::size_t>(options_.lstm.window);
  }
  return 1;
}

std::size_t DetectorModel::ann_zero_pad() const {
  return arch_ == Arch::kAnn ? static_cast<std::size_t>(options_.ann.zero_pad) : 0;
}

Shape DetectorModel::input_shape() const {
  switch (arch_) {
    case Arch::kAnn:
      return {1 + 2 * n_links_ + ann_zero_pad()};
    case Arch::kCnn:
      return {1, window_length(), 2 * n_links_};
    case Arch::kLstm:
      return {window_length(), 2 * n_links_};
  }
  return {};
}

void DetectorModel::set_normalization(Normalization normalization) {
  if (normalization.min.size() != 1 + 2 * n_links_ ||
      normalization.max.size() != normalization.min.size()) {
    throw IncompatibleError("normalization covers " +
                            std::to_string(normalization.min.size()) +
                            " features, model expects " +
                            std::to_string(1 + 2 * n_links_));
  }
  normalization_ = std::move(normalization);
}

std::vector<std::pair<std::string, std::string>> DetectorModel::Hyperparameters() const {
  std::vector<std::pair<std::string, std::string>> kv{{"n_links", std::to_string(n_links_)}};
  auto add = [&kv](const char* key, int v) { kv.emplace_back(key, std::to_string(v)); };
  switch (arch_) {
    case Arch::kAnn:
      add("hidden", options_.ann.hidden);
      add("zero_pad", options_.ann.zero_pad);
      break;
    case Arch::kCnn:
      add("window", options_.cnn.window);
      add("temporal_kernels", options_.cnn.temporal_kernels);
      add("temporal_width", options_.cnn.temporal_width);
      add("spatial_kernels", options_.cnn.spatial_kernels);
      add("spatial_rows", options_.cnn.spatial_rows);
      add("dense_units", options_.cnn.dense_units);
      break;
    case Arch::kLstm:
      add("window", options_.lstm.window);
      add("units", options_.lstm.units);
      add("layers", options_.lstm.layers);
      break;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", options_.threshold);
  kv.emplace_back("threshold", buf);
  return kv;
}

std::vector<std::string> DetectorModel::ParameterNames() const {
  switch (arch_) {
    case Arch::kAnn:
      return {"dense1.weight", "dense1.bias", "dense2.weight",
              "dense2.bias",   "head.weight", "head.bias"};
    case Arch::kCnn:
      return {"temporal.kernels", "temporal.bias", "spatial.kernels",
              "spatial.bias",     "dense.weight",  "dense.bias",
              "head.weight",      "head.bias"};
    case Arch::kLstm: {
      std::vector<std::string> names;
      const auto& net = std::get<Lstm>(net_);
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const std::string p = "lstm" + std::to_string(l + 1) + ".";
        names.push_back(p + "input_weight");
        names.push_back(p + "recurrent_weight");
        names.push_back(p + "bias");
      }
      names.push_back("head.weight");
      names.push_back("head.bias");
      return names;
    }
  }
  return {};
}

std::vector<Tensor*> DetectorModel::Parameters() {
  return std::visit(
      [](auto& net) -> std::vector<Tensor*> {
        using T = std::decay_t<decltype(net)>;
        if constexpr (std::is_same_v<T, Ann>) {
          return {&net.w1, &net.b1, &net.w2, &net.b2, &net.head_w, &net.head_b};
        } else if constexpr (std::is_same_v<T, Cnn>) {
          return {&net.temporal_k, &net.temporal_b, &net.spatial_k, &net.spatial_b,
                  &net.dense_w,    &net.dense_b,    &net.head_w,    &net.head_b};
        } else {
          std::vector<Tensor*> out;
          for (nn::LstmParams& layer : net.layers) {
            out.push_back(&layer.input_weight);
            out.push_back(&layer.recurrent_weight);
            out.push_back(&layer.bias);
          }
          out.push_back(&net.head_w);
          out.push_back(&net.head_b);
          return out;
        }
      },
      net_);
}

std::vector<const Tensor*> DetectorModel::Parameters() const {
  const std::vector<Tensor*> p = const_cast<DetectorModel*>(this)->Parameters();
  return {p.begin(), p.end()};
}

void DetectorModel::CheckInput(const Tensor& input) const {
  if (input.shape() != input_shape()) {
    throw ShapeError(std::string(ArchName(arch_)) + " detector expects input " +
                     nn::ShapeToString(input_shape()) + ", got " +
                     nn::ShapeToString(input.shape()));
  }
}

double DetectorModel::Predict(const Tensor& input) const {
  CheckInput(input);
  return std::visit(
      [&input](const auto& net) -> double {
        using T = std::decay_t<decltype(net)>;
        if constexpr (std::is_same_v<T, Ann>) {
          const Tensor h1 = nn::ReluForward(nn::DenseForward(input, net.w1, net.b1));
          const Tensor h2 = nn::ReluForward(nn::DenseForward(h1, net.w2, net.b2));
          return nn::Sigmoid(HeadLogit(h2, net.head_w, net.head_b));
        } else if constexpr (std::is_same_v<T, Cnn>) {
          const Tensor t = nn::ReluForward(
              nn::Conv2dForward(input, net.temporal_k, net.temporal_b));
          const Tensor s =
              nn::ReluForward(nn::Conv2dForward(t, net.spatial_k, net.spatial_b));
          const Tensor d = nn::ReluForward(
              nn::DenseForward(s.Reshaped({s.size()}), net.dense_w, net.dense_b));
          return nn::Sigmoid(HeadLogit(d, net.head_w, net.head_b));
        } else {
          Tensor seq = input;
          for (const nn::LstmParams& layer : net.layers) {
            seq = nn::LstmForward(seq, layer).Outputs();
          }
          const std::size_t steps = seq.dim(0), units = seq.dim(1);
          Tensor last({units}, std::vector<double>(seq.data() + (steps - 1) * units,
                                                   seq.data() + steps * units));
          return nn::Sigmoid(HeadLogit(last, net.head_w, net.head_b));
        }
      },
      net_);
}

double DetectorModel::AccumulateGradient(const Tensor& input, double label,
                                         std::span<Tensor> g) const {
  CheckInput(input);
  // The sigmoid and cross-entropy are fused: d loss / d logit = p - y.
  return std::visit(
      [&](const auto& net) -> double {
        using T = std::decay_t<decltype(net)>;
        double p = 0.0;
        Tensor dlogit({1});
        if constexpr (std::is_same_v<T, Ann>) {
          const Tensor a1 = nn::DenseForward(input, net.w1, net.b1);
          const Tensor h1 = nn::ReluForward(a1);
          const Tensor a2 = nn::DenseForward(h1, net.w2, net.b2);
          const Tensor h2 = nn::ReluForward(a2);
          p = nn::Sigmoid(HeadLogit(h2, net.head_w, net.head_b));
          dlogit[0] = p - label;
          Tensor dh2, dh1;
          nn::DenseBackward(h2, net.head_w, dlogit, &dh2, g[4], g[5]);
          nn::DenseBackward(h1, net.w2, nn::ReluBackward(a2, dh2), &dh1, g[2], g[3]);
          nn::DenseBackward(input, net.w1, nn::ReluBackward(a1, dh1), nullptr, g[0], g[1]);
        } else if constexpr (std::is_same_v<T, Cnn>) {
          const Tensor ta = nn::Conv2dForward(input, net.temporal_k, net.temporal_b);
          const Tensor t = nn::ReluForward(ta);
          const Tensor sa = nn::Conv2dForward(t, net.spatial_k, net.spatial_b);
          const Tensor s = nn::ReluForward(sa);
          const Tensor flat = s.Reshaped({s.size()});
          const Tensor da = nn::DenseForward(flat, net.dense_w, net.dense_b);
          const Tensor d = nn::ReluForward(da);
          p = nn::Sigmoid(HeadLogit(d, net.head_w, net.head_b));
          dlogit[0] = p - label;
          Tensor dd, dflat, dt;
          nn::DenseBackward(d, net.head_w, dlogit, &dd, g[6], g[7]);
          nn::DenseBackward(flat, net.dense_w, nn::ReluBackward(da, dd), &dflat, g[4], g[5]);
          nn::Conv2dBackward(t, net.spatial_k,
                             nn::ReluBackward(sa, dflat.Reshaped(s.shape())), &dt,
                             g[2], g[3]);
          nn::Conv2dBackward(input, net.temporal_k, nn::ReluBackward(ta, dt), nullptr,
                             g[0], g[1]);
        } else {
          const std::size_t n_layers = net.layers.size();
          std::vector<Tensor> inputs{input};
          std::vector<nn::LstmTrace> traces;
          for (const nn::LstmParams& layer : net.layers) {
            traces.push_back(nn::LstmForward(inputs.back(), layer));
            inputs.push_back(traces.back().Outputs());
          }
          const Tensor& top = inputs.back();
          const std::size_t steps = top.dim(0), units = top.dim(1);
          Tensor last({units}, std::vector<double>(top.data() + (steps - 1) * units,
                                                   top.data() + steps * units));
          p = nn::Sigmoid(HeadLogit(last, net.head_w, net.head_b));
          dlogit[0] = p - label;
          Tensor dlast;
          nn::DenseBackward(last, net.head_w, dlogit, &dlast, g[3 * n_layers],
                            g[3 * n_layers + 1]);
          Tensor dseq({steps, units});
          std::copy(dlast.data(), dlast.data() + units, dseq.data() + (steps - 1) * units);
          for (std::size_t l = n_layers; l-- > 0;) {
            nn::LstmParams grads;
            std::swap(grads.input_weight, g[3 * l]);
            std::swap(grads.recurrent_weight, g[3 * l + 1]);
            std::swap(grads.bias, g[3 * l + 2]);
            dseq = nn::LstmBackward(inputs[l], net.layers[l], traces[l], dseq, grads);
            std::swap(grads.input_weight, g[3 * l]);
            std::swap(grads.recurrent_weight, g[3 * l + 1]);
            std::swap(grads.bias, g[3 * l + 2]);
          }
        }
        return nn::BceLoss(p, label).loss;
      },
      net_);
}

DetectorModel BuildDetector(Arch arch, std::size_t n_links, std::uint64_t seed,
                            const DetectorOptions& options) {
  return DetectorModel(arch, n_links, options, seed);
}

Tensor Featurize(std::span<const sim::TrafficSample> samples,
                 const DetectorModel& model) {
  const std::size_t w = model.window_length();
  if (samples.size() < w) {
    throw ConfigError(std::string(ArchName(model.arch())) + " needs a window of " +
                      std::to_string(w) + " samples, got " +
                      std::to_string(samples.size()));
  }
  const Normalization& norm = model.normalization();
  if (norm.min.empty()) throw ConfigError("detector has no normalization statistics");
  const std::size_t n_links = model.n_links();
  const auto window = samples.subspan(samples.size() - w);
  for (const sim::TrafficSample& s : window) {
    if (s.per_link.size() != n_links) {
      throw IncompatibleError("sample has " + std::to_string(s.per_link.size()) +
                              " links, model expects " + std::to_string(n_links));
    }
  }
  Tensor out(model.input_shape());
  double* dst = out.data();
  if (model.arch() == Arch::kAnn) {
    const sim::TrafficSample& s = window.front();
    *dst++ = norm.Scale(0, s.timestamp);
    for (std::size_t i = 0; i < n_links; ++i) {
      *dst++ = norm.Scale(1 + 2 * i, s.per_link[i].flow_count);
      *dst++ = norm.Scale(2 + 2 * i, s.per_link[i].aggregate_size);
    }
    return out;  // trailing pad stays zero
  }
  for (const sim::TrafficSample& s : window) {
    for (std::size_t i = 0; i < n_links; ++i) {
      *dst++ = norm.Scale(1 + 2 * i, s.per_link[i].flow_count);
      *dst++ = norm.Scale(2 + 2 * i, s.per_link[i].aggregate_size);
    }
  }
  return out;
}

DetectorOutput Classify(const DetectorModel& model, const Tensor& input,
                        double window_end_timestamp) {
  DetectorOutput out;
  out.probability = model.Predict(input);
  out.verdict = out.probability >= model.threshold() ? Verdict::kAttack : Verdict::kNormal;
  out.window_end_timestamp = window_end_timestamp;
  return out;
}

bool WindowLabel(std::span<const sim::TrafficSample> window) {
  const auto attacks = std::count_if(window.begin(), window.end(),
                                     [](const auto& s) { return s.attack; });
  return 2 * static_cast<std::size_t>(attacks) >= window.size() && !window.empty();
}

std::vector<Window> MakeWindows(std::span<const sim::TrafficSample> samples,
                                std::size_t length) {
  std::vector<Window> windows;
  if (length == 0 || samples.size() < length) return windows;
  windows.reserve(samples.size() - length + 1);
  for (std::size_t end = length - 1; end < samples.size(); ++end) {
    windows.push_back({end, samples[end].timestamp,
                       WindowLabel(samples.subspan(end + 1 - length, length))});
  }
  return windows;
}

std::vector<nn::Example> MakeExamples(std::span<const sim::TrafficSample> samples,
                                      std::span<const Window> windows,
                                      const DetectorModel& model) {
  std::vector<nn::Example> out;
  out.reserve(windows.size());
  for (const Window& w : windows) {
    out.push_back({Featurize(samples.first(w.end + 1), model), w.attack ? 1.0 : 0.0});
  }
  return out;
}

}  // namespace crossfire::detect
