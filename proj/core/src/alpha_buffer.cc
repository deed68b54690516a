#include "crossfire/alpha_buffer.h"

#include "crossfire/error.h"

namespace crossfire::detect {

AlphaBuffer::AlphaBuffer(std::size_t alpha) : ring_(alpha, Verdict::kNormal) {
  if (alpha == 0) throw ConfigError("alpha must be >= 1");
}

NetworkState AlphaBuffer::Push(Verdict verdict) {
  if (verdict == Verdict::kNormal) {
    head_ = 0;
    size_ = 0;
    return state();
  }
  if (size_ < ring_.size()) {
    ring_[(head_ + size_) % ring_.size()] = verdict;
    ++size_;
  } else {
    ring_[head_] = verdict;
    head_ = (head_ + 1) % ring_.size();
  }
  return state();
}

std::vector<Verdict> AlphaBuffer::Contents() const {
  std::vector<Verdict> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back(ring_[(head_ + i) % ring_.size()]);
  return out;
}

StreamResult DetectStream(const DetectorModel& model,
                          std::span<const sim::TrafficSample> samples,
                          std::size_t alpha) {
  StreamResult result;
  AlphaBuffer buffer(alpha);
  const std::size_t w = model.window_length();
  if (samples.size() < w) {
    result.too_short = true;
    return result;
  }
  result.steps.reserve(samples.size() - w + 1);
  for (std::size_t end = w - 1; end < samples.size(); ++end) {
    const DetectorOutput out =
        Classify(model, Featurize(samples.first(end + 1), model), samples[end].timestamp);
    result.steps.push_back({out.window_end_timestamp, out.probability, out.verdict,
                            buffer.Push(out.verdict)});
  }
  return result;
}

std::vector<NetworkState> ApplyAlpha(std::span<const Verdict> verdicts,
                                     std::size_t alpha) {
  AlphaBuffer buffer(alpha);
  std::vector<NetworkState> states;
  states.reserve(verdicts.size());
  for (Verdict v : verdicts) states.push_back(buffer.Push(v));
  return states;
}

}  // namespace crossfire::detect
