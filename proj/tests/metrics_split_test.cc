#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "crossfire/error.h"
#include "crossfire/metrics.h"
#include "crossfire/rng.h"
#include "crossfire/split.h"

namespace crossfire::eval {
namespace {

using detect::Verdict;

std::vector<Verdict> RandomVerdicts(std::size_t n, Rng& rng) {
  std::vector<Verdict> v(n);
  for (Verdict& x : v) x = rng.Below(2) ? Verdict::kAttack : Verdict::kNormal;
  return v;
}

TEST(ConfusionTest, AllCorrect) {
  const std::vector<Verdict> v{Verdict::kAttack, Verdict::kNormal, Verdict::kAttack};
  const ConfusionCounts c = Confusion(v, v);
  EXPECT_EQ(c.false_positive, 0);
  EXPECT_EQ(c.false_negative, 0);
  EXPECT_EQ(c.true_positive, 2);
  EXPECT_EQ(c.true_negative, 1);
}

TEST(ConfusionTest, AllAttackOnNormal) {
  const std::vector<Verdict> p(5, Verdict::kAttack), l(5, Verdict::kNormal);
  const ConfusionCounts c = Confusion(p, l);
  EXPECT_EQ(c.true_positive, 0);
  EXPECT_EQ(c.false_positive, 5);
}

TEST(ConfusionTest, LengthMismatchThrows) {
  const std::vector<Verdict> p(2), l(3);
  EXPECT_THROW(Confusion(p, l), ConfigError);
}

TEST(ConfusionTest, MatchesBruteForceTally) {
  Rng rng(1);
  const auto p = RandomVerdicts(1000, rng), l = RandomVerdicts(1000, rng);
  ConfusionCounts want;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pa = p[i] == Verdict::kAttack, la = l[i] == Verdict::kAttack;
    if (pa && la) ++want.true_positive;
    if (pa && !la) ++want.false_positive;
    if (!pa && !la) ++want.true_negative;
    if (!pa && la) ++want.false_negative;
  }
  EXPECT_EQ(Confusion(p, l), want);
  EXPECT_EQ(Confusion(p, l).total(), 1000);
}

TEST(ConfusionTest, PermutationInvariant) {
  Rng rng(2);
  auto p = RandomVerdicts(300, rng), l = RandomVerdicts(300, rng);
  const ConfusionCounts before = Confusion(p, l);
  std::vector<std::size_t> order(300);
  for (std::size_t i = 0; i < 300; ++i) order[i] = i;
  Shuffle(order, rng);
  std::vector<Verdict> pp, ll;
  for (std::size_t i : order) {
    pp.push_back(p[i]);
    ll.push_back(l[i]);
  }
  EXPECT_EQ(Confusion(pp, ll), before);
}

TEST(MetricsTest, HandArithmetic) {
  EXPECT_DOUBLE_EQ(*Precision({.true_positive = 3, .false_positive = 1}), 0.75);
  EXPECT_DOUBLE_EQ(*Recall({.true_positive = 3, .false_negative = 3}), 0.5);
  const ConfusionCounts c{.true_positive = 8, .false_positive = 2, .true_negative = 5,
                          .false_negative = 2};
  EXPECT_DOUBLE_EQ(*Precision(c), 0.8);
  EXPECT_DOUBLE_EQ(*Recall(c), 0.8);
  EXPECT_NEAR(*F1(c), 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(*Accuracy(c), 13.0 / 17.0);
}

TEST(MetricsTest, UndefinedInsteadOfCoerced) {
  const ConfusionCounts empty;
  EXPECT_FALSE(Precision(empty));
  EXPECT_FALSE(Recall(empty));
  EXPECT_FALSE(Accuracy(empty));
  EXPECT_FALSE(F1(empty));
  const ConfusionCounts no_hits{.false_positive = 2, .false_negative = 3};
  EXPECT_EQ(*Precision(no_hits), 0.0);
  EXPECT_EQ(*Recall(no_hits), 0.0);
  EXPECT_FALSE(F1(no_hits));
  EXPECT_FALSE(F1({.true_negative = 4, .false_negative = 1}));  // precision undefined
  EXPECT_EQ(FormatMetric(std::nullopt), "NA");
  EXPECT_EQ(FormatMetric(0.5, 3), "0.500");
}

TEST(MetricsTest, RandomPairsMatchBruteForce) {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.Below(60);
    const auto p = RandomVerdicts(n, rng), l = RandomVerdicts(n, rng);
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool pa = p[i] == Verdict::kAttack, la = l[i] == Verdict::kAttack;
      tp += pa && la;
      fp += pa && !la;
      tn += !pa && !la;
      fn += !pa && la;
    }
    const MetricsReport r = MetricsReport::From(Confusion(p, l));
    EXPECT_EQ(*r.accuracy, (tp + tn) / static_cast<double>(n));
    if (tp + fp > 0) {
      EXPECT_EQ(*r.precision, tp / (tp + fp));
    }
    if (tp + fn > 0) {
      EXPECT_EQ(*r.recall, tp / (tp + fn));
    }
    if (r.f1) {
      const double pr = *r.precision, rc = *r.recall;
      EXPECT_NEAR(*r.f1, 2 * pr * rc / (pr + rc), 1e-12);
      EXPECT_GE(*r.f1, 0.0);
      EXPECT_LE(*r.f1, 1.0);
    }
  }
}

TEST(SplitTest, BalancedHundredAt70Percent) {
  std::vector<bool> labels(100);
  for (std::size_t i = 0; i < 100; ++i) labels[i] = i % 2 == 0;
  const Split s = StratifiedSplit(labels, 0.7, 5);
  EXPECT_EQ(s.train.size(), 70u);
  EXPECT_EQ(s.test.size(), 30u);
  EXPECT_EQ(std::count_if(s.train.begin(), s.train.end(), [&](auto i) { return labels[i]; }),
            35);
}

TEST(SplitTest, SameSeedSameSplit) {
  std::vector<bool> labels(57);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 3 == 0;
  const Split a = StratifiedSplit(labels, 0.6, 9), b = StratifiedSplit(labels, 0.6, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
}

TEST(SplitTest, PartitionAndStratificationProperties) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 6 + rng.Below(300);
    std::vector<bool> labels(n);
    const double rate = rng.Uniform(0.1, 0.9);
    std::size_t attacks = 0;
    for (std::size_t i = 0; i < n; ++i) attacks += labels[i] = rng.Uniform01() < rate;
    if (attacks < 2 || n - attacks < 2) continue;
    const double frac = rng.Uniform(0.1, 0.9);
    const Split s = StratifiedSplit(labels, frac, trial);
    std::vector<std::size_t> all = s.train;
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), n);
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(all[i], i);
    const double train_attacks = static_cast<double>(
        std::count_if(s.train.begin(), s.train.end(), [&](auto i) { return labels[i]; }));
    const double gap = std::abs(train_attacks / static_cast<double>(s.train.size()) -
                                static_cast<double>(attacks) / static_cast<double>(n));
    EXPECT_LE(gap, 1.0 / static_cast<double>(s.train.size()) + 1e-12);
  }
}

TEST(SplitTest, TinyClassRejected) {
  std::vector<bool> labels(10, false);
  labels[3] = true;
  EXPECT_THROW(StratifiedSplit(labels, 0.7, 1), ConfigError);
  EXPECT_THROW(StratifiedSplit(std::vector<bool>(10, false), 0.5, 1), ConfigError);
  labels[4] = true;
  EXPECT_THROW(StratifiedSplit(labels, 1.0, 1), ConfigError);
  EXPECT_NO_THROW(StratifiedSplit(labels, 0.7, 1));
}

}  // namespace
}  // namespace crossfire::eval
