#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "crossfire/error.h"
#include "crossfire/rng.h"
#include "crossfire/tensor.h"

namespace crossfire {
namespace {

TEST(RngTest, SameSeedSameSequence) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.Uniform01();
    EXPECT_EQ(x, b.Uniform01());
    differs = differs || x != c.Uniform01();
  }
  EXPECT_TRUE(differs);
}

TEST(RngTest, UniformStaysInRange) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double x = rng.Uniform(600, 1700);
    ASSERT_GE(x, 600.0);
    ASSERT_LT(x, 1700.0);
  }
}

TEST(RngTest, BelowCoversRangeEvenly) {
  Rng rng(2);
  std::vector<int> counts(7);
  for (int i = 0; i < 70000; ++i) ++counts[rng.Below(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(RngTest, MixSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t stream = 0; stream < 4; ++stream) {
      for (std::uint64_t idx = 0; idx < 4; ++idx) seen.insert(MixSeed(s, stream, idx));
    }
  }
  EXPECT_EQ(seen.size(), 64u);
  EXPECT_EQ(MixSeed(5, 6, 7), MixSeed(5, 6, 7));
}

TEST(RngTest, ShuffleIsSeededPermutation) {
  std::vector<int> a(50), b;
  for (int i = 0; i < 50; ++i) a[i] = i;
  b = a;
  Rng r1(3), r2(3);
  Shuffle(a, r1);
  Shuffle(b, r2);
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(TensorTest, ShapeAndValues) {
  nn::Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rank(), 2u);
  t.at(1, 2) = 4.0;
  EXPECT_EQ(t[5], 4.0);
  EXPECT_EQ(nn::ShapeToString(t.shape()), "[2x3]");
  const nn::Tensor r = t.Reshaped({3, 2});
  EXPECT_EQ(r.at(2, 1), 4.0);
  EXPECT_THROW(t.Reshaped({4, 2}), ShapeError);
}

TEST(TensorTest, InvalidShapesRejected) {
  EXPECT_THROW(nn::Tensor({2, 0}), ShapeError);
  EXPECT_THROW(nn::Tensor({2, 2}, std::vector<double>{1.0, 2.0}), ShapeError);
  EXPECT_THROW(nn::RequireSameShape(nn::Tensor({2}), nn::Tensor({3}), "test"), ShapeError);
}

}  // namespace
}  // namespace crossfire
