#include "crossfire/metrics.h"

#include <cstdio>

#include "crossfire/error.h"

namespace crossfire::eval {
namespace {

std::optional<double> Ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts Confusion(std::span<const detect::Verdict> predictions,
                          std::span<const detect::Verdict> labels) {
  if (predictions.size() != labels.size()) {
    throw ConfigError("confusion: " + std::to_string(predictions.size()) +
                      " predictions vs " + std::to_string(labels.size()) + " labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = predictions[i] == detect::Verdict::kAttack;
    const bool actual = labels[i] == detect::Verdict::kAttack;
    if (predicted && actual) {
      ++c.true_positive;
    } else if (predicted) {
      ++c.false_positive;
    } else if (actual) {
      ++c.false_negative;
    } else {
      ++c.true_negative;
    }
  }
  return c;
}

std::optional<double> Precision(const ConfusionCounts& c) {
  return Ratio(c.true_positive, c.true_positive + c.false_positive);
}

std::optional<double> Recall(const ConfusionCounts& c) {
  return Ratio(c.true_positive, c.true_positive + c.false_negative);
}

std::optional<double> Accuracy(const ConfusionCounts& c) {
  return Ratio(c.true_positive + c.true_negative, c.total());
}

std::optional<double> F1(const ConfusionCounts& c) {
  const auto p = Precision(c), r = Recall(c);
  if (!p || !r || (*p == 0.0 && *r == 0.0)) return std::nullopt;
  return 2.0 * *p * *r / (*p + *r);
}

MetricsReport MetricsReport::From(const ConfusionCounts& counts) {
  return {Accuracy(counts), Precision(counts), Recall(counts), F1(counts), counts};
}

std::string FormatMetric(const std::optional<double>& value, int decimals) {
  if (!value) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, *value);
  return buf;
}

}  // namespace crossfire::eval
