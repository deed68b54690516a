#ifndef CROSSFIRE_ALPHA_BUFFER_H
#define CROSSFIRE_ALPHA_BUFFER_H

#include <cstddef>
#include <span>
#include <vector>

#include "crossfire/detector.h"

namespace crossfire::detect {

enum class NetworkState { kNormal, kUnderAttack };

// Circular buffer of the most recent consecutive attack verdicts. A normal
// verdict empties it; the network is under attack while it is full.
class AlphaBuffer {
 public:
  // Throws ConfigError for alpha == 0.
  explicit AlphaBuffer(std::size_t alpha);

  NetworkState Push(Verdict verdict);
  NetworkState state() const {
    return size_ == ring_.size() ? NetworkState::kUnderAttack : NetworkState::kNormal;
  }
  std::size_t capacity() const { return ring_.size(); }
  std::size_t size() const { return size_; }
  // Oldest to newest.
  std::vector<Verdict> Contents() const;

 private:
  std::vector<Verdict> ring_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

struct StreamStep {
  double timestamp = 0.0;  // window end
  double probability = 0.0;
  Verdict verdict = Verdict::kNormal;
  NetworkState state = NetworkState::kNormal;
};

struct StreamResult {
  std::vector<StreamStep> steps;
  // Set when the stream was shorter than one window.
  bool too_short = false;
};

// Slides the model's window by one sample over the stream, classifies each
// window and feeds the verdicts through an AlphaBuffer of capacity `alpha`.
StreamResult DetectStream(const DetectorModel& model,
                          std::span<const sim::TrafficSample> samples,
                          std::size_t alpha);

// Replays verdicts through a fresh AlphaBuffer; one state per verdict.
std::vector<NetworkState> ApplyAlpha(std::span<const Verdict> verdicts,
                                     std::size_t alpha);

}  // namespace crossfire::detect

#endif  // CROSSFIRE_ALPHA_BUFFER_H
