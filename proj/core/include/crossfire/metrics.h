#ifndef CROSSFIRE_METRICS_H
#define CROSSFIRE_METRICS_H

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crossfire/detector.h"

namespace crossfire::eval {

// Positive class is attack.
struct ConfusionCounts {
  std::int64_t true_positive = 0;
  std::int64_t false_positive = 0;
  std::int64_t true_negative = 0;
  std::int64_t false_negative = 0;

  std::int64_t total() const {
    return true_positive + false_positive + true_negative + false_negative;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

// Throws ConfigError when the lengths differ.
ConfusionCounts Confusion(std::span<const detect::Verdict> predictions,
                          std::span<const detect::Verdict> labels);

// Each returns nullopt (undefined) when its denominator is zero.
std::optional<double> Precision(const ConfusionCounts& c);
std::optional<double> Recall(const ConfusionCounts& c);
std::optional<double> Accuracy(const ConfusionCounts& c);
// Undefined when precision or recall is undefined or both are zero.
std::optional<double> F1(const ConfusionCounts& c);

struct MetricsReport {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  ConfusionCounts counts;

  static MetricsReport From(const ConfusionCounts& counts);
};

// "NA" for undefined, otherwise fixed-point with `decimals` digits.
std::string FormatMetric(const std::optional<double>& value, int decimals = 6);

inline detect::Verdict ToVerdict(bool attack) {
  return attack ? detect::Verdict::kAttack : detect::Verdict::kNormal;
}

}  // namespace crossfire::eval

#endif  // CROSSFIRE_METRICS_H
