#include "crossfire/layers.h"

#include <cmath>

#include <gtest/gtest.h>

#include "crossfire/error.h"
#include "crossfire/gradcheck.h"
#include "test_util.h"

namespace crossfire::nn {
namespace {

using ::crossfire::testing::Dot;
using ::crossfire::testing::RandomTensor;

TEST(GradCheckTest, NumericalGradientOfCubic) {
  Tensor x({3}, {0.5, -1.0, 2.0});
  auto loss = [&x] {
    double s = 0.0;
    for (double v : x.values()) s += v * v * v;
    return s;
  };
  const Tensor g = NumericalGradient(loss, x);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g[i], 3 * x[i] * x[i], 1e-8);
  EXPECT_EQ(x, Tensor({3}, {0.5, -1.0, 2.0}));
}

TEST(GradCheckTest, RelativeErrorUsesFloor) {
  EXPECT_DOUBLE_EQ(MaxRelativeError(Tensor({1}, {1e-9}), Tensor({1}, {0.0})), 1e-3);
  EXPECT_DOUBLE_EQ(MaxRelativeError(Tensor({2}, {1.0, 2.0}), Tensor({2}, {1.0, 1.0})), 0.5);
}

TEST(DenseTest, IdentityWeightsPassInputThrough) {
  Tensor w({3, 3});
  for (std::size_t i = 0; i < 3; ++i) w.at(i, i) = 1.0;
  const Tensor x({3}, {1.5, -2.0, 0.25});
  EXPECT_EQ(DenseForward(x, w, Tensor({3})), x);
}

TEST(DenseTest, ZeroWeightsGiveBias) {
  const Tensor b({2}, {0.3, -0.7});
  EXPECT_EQ(DenseForward(Tensor({4}, 5.0), Tensor({2, 4}), b), b);
}

TEST(DenseTest, ShapeMismatchNamesBothShapes) {
  try {
    DenseForward(Tensor({3}), Tensor({2, 4}), Tensor({2}));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[3]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[2x4]"), std::string::npos) << msg;
  }
}

TEST(DenseTest, GradientsMatchFiniteDifferences) {
  Rng rng(11);
  Tensor x = RandomTensor({3}, rng), w = RandomTensor({5, 3}, rng), b = RandomTensor({5}, rng);
  const Tensor r = RandomTensor({5}, rng);
  auto loss = [&] { return Dot(DenseForward(x, w, b), r); };
  Tensor dx, dw({5, 3}), db({5});
  DenseBackward(x, w, r, &dx, dw, db);
  EXPECT_LT(MaxRelativeError(dx, NumericalGradient(loss, x)), 1e-6);
  EXPECT_LT(MaxRelativeError(dw, NumericalGradient(loss, w)), 1e-6);
  EXPECT_LT(MaxRelativeError(db, NumericalGradient(loss, b)), 1e-6);
}

TEST(DenseTest, BackwardAccumulatesIntoParameterGradients) {
  Rng rng(12);
  const Tensor x = RandomTensor({2}, rng), w = RandomTensor({3, 2}, rng);
  const Tensor dy = RandomTensor({3}, rng);
  Tensor dw1({3, 2}), db1({3}), dw2({3, 2}), db2({3});
  DenseBackward(x, w, dy, nullptr, dw1, db1);
  DenseBackward(x, w, dy, nullptr, dw2, db2);
  DenseBackward(x, w, dy, nullptr, dw2, db2);
  for (std::size_t i = 0; i < dw1.size(); ++i) EXPECT_DOUBLE_EQ(dw2[i], 2 * dw1[i]);
  for (std::size_t i = 0; i < db1.size(); ++i) EXPECT_DOUBLE_EQ(db2[i], 2 * db1[i]);
}

TEST(ReluTest, ClampsNegatives) {
  EXPECT_EQ(ReluForward(Tensor({3}, {-1.0, 0.0, 2.0})), Tensor({3}, {0.0, 0.0, 2.0}));
}

TEST(ReluTest, SubgradientAtZeroIsZero) {
  const Tensor g = ReluBackward(Tensor({3}, {-1.0, 0.0, 2.0}), Tensor({3}, 1.0));
  EXPECT_EQ(g, Tensor({3}, {0.0, 0.0, 1.0}));
}

TEST(ReluTest, OutputsNonNegative) {
  Rng rng(3);
  for (double v : ReluForward(RandomTensor({200}, rng, -5, 5)).values()) EXPECT_GE(v, 0.0);
}

TEST(SigmoidTest, HalfAtZero) { EXPECT_DOUBLE_EQ(Sigmoid(0.0), 0.5); }

TEST(SigmoidTest, StaysInsideOpenUnitInterval) {
  for (double x : {-30.0, -5.0, 0.0, 5.0, 30.0}) {
    EXPECT_GT(Sigmoid(x), 0.0);
    EXPECT_LT(Sigmoid(x), 1.0);
  }
  EXPECT_TRUE(std::isfinite(Sigmoid(-800.0)));
}

TEST(SigmoidTest, GradientMatchesClosedFormAndFiniteDifferences) {
  Rng rng(5);
  Tensor x = RandomTensor({25}, rng, -4, 4);
  const Tensor y = SigmoidForward(x);
  const Tensor g = SigmoidBackward(y, Tensor({25}, 1.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = 1.0 / (1.0 + std::exp(-x[i]));
    EXPECT_NEAR(g[i], s * (1 - s), 1e-15);
  }
  auto loss = [&] { return Dot(SigmoidForward(x), Tensor({25}, 1.0)); };
  EXPECT_LT(MaxRelativeError(g, NumericalGradient(loss, x)), 1e-7);
}

TEST(Conv2dTest, UnitKernelCopiesInput) {
  Rng rng(1);
  const Tensor in = RandomTensor({4, 6}, rng);
  const Tensor out = Conv2dForward(in, Tensor({1, 1, 1}, 1.0), Tensor({1}));
  EXPECT_EQ(out, in.Reshaped({1, 4, 6}));
}

TEST(Conv2dTest, OnesKernelSumsInput) {
  const Tensor in({2, 2}, {1.0, 2.0, 3.0, 4.5});
  const Tensor out = Conv2dForward(in, Tensor({1, 2, 2}, 1.0), Tensor({1}));
  EXPECT_EQ(out.shape(), (Shape{1, 1, 1}));
  EXPECT_DOUBLE_EQ(out[0], 10.5);
}

TEST(Conv2dTest, MatchesDirectCrossCorrelation) {
  Rng rng(8);
  const Tensor in = RandomTensor({2, 5, 7}, rng);
  const Tensor k = RandomTensor({3, 2, 2, 6}, rng);
  const Tensor b = RandomTensor({3}, rng);
  const Tensor out = Conv2dForward(in, k, b);
  ASSERT_EQ(out.shape(), (Shape{3, 4, 2}));
  for (std::size_t o = 0; o < 3; ++o) {
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 2; ++c) {
        double want = b[o];
        for (std::size_t ch = 0; ch < 2; ++ch) {
          for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t q = 0; q < 6; ++q) {
              want += k[((o * 2 + ch) * 2 + a) * 6 + q] * in.at(ch, r + a, c + q);
            }
          }
        }
        EXPECT_NEAR(out.at(o, r, c), want, 1e-12);
      }
    }
  }
}

TEST(Conv2dTest, OutputShapeFormula) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t h = 1 + rng.Below(8), w = 1 + rng.Below(8);
    const std::size_t kh = 1 + rng.Below(h), kw = 1 + rng.Below(w), n = 1 + rng.Below(3);
    const Tensor out = Conv2dForward(Tensor({h, w}), Tensor({n, kh, kw}), Tensor({n}));
    EXPECT_EQ(out.shape(), (Shape{n, h - kh + 1, w - kw + 1}));
  }
}

TEST(Conv2dTest, KernelLargerThanInputThrows) {
  EXPECT_THROW(Conv2dForward(Tensor({3, 3}), Tensor({1, 4, 1}), Tensor({1})), ShapeError);
  EXPECT_THROW(Conv2dForward(Tensor({3, 3}), Tensor({1, 1, 4}), Tensor({1})), ShapeError);
}

TEST(Conv2dTest, GradientsMatchFiniteDifferencesOn10x50) {
  Rng rng(21);
  Tensor in = RandomTensor({10, 50}, rng), k = RandomTensor({3, 3, 4}, rng),
         b = RandomTensor({3}, rng);
  const Tensor r = RandomTensor({3, 8, 47}, rng);
  auto loss = [&] { return Dot(Conv2dForward(in, k, b), r); };
  Tensor din, dk({3, 3, 4}), db({3});
  Conv2dBackward(in, k, r, &din, dk, db);
  EXPECT_LT(MaxRelativeError(din, NumericalGradient(loss, in)), 1e-6);
  EXPECT_LT(MaxRelativeError(dk, NumericalGradient(loss, k)), 1e-6);
  EXPECT_LT(MaxRelativeError(db, NumericalGradient(loss, b)), 1e-6);
}

TEST(Conv2dTest, WideKernelGradientsMatchFiniteDifferences) {
  // Kernel wider than the output exercises the alternate loop order.
  Rng rng(22);
  Tensor in = RandomTensor({4, 6, 12}, rng), k = RandomTensor({2, 4, 3, 11}, rng),
         b = RandomTensor({2}, rng);
  const Tensor r = RandomTensor({2, 4, 2}, rng);
  auto loss = [&] { return Dot(Conv2dForward(in, k, b), r); };
  Tensor din, dk({2, 4, 3, 11}), db({2});
  Conv2dBackward(in, k, r, &din, dk, db);
  EXPECT_LT(MaxRelativeError(din, NumericalGradient(loss, in)), 1e-6);
  EXPECT_LT(MaxRelativeError(dk, NumericalGradient(loss, k)), 1e-6);
  EXPECT_LT(MaxRelativeError(db, NumericalGradient(loss, b)), 1e-6);
}

TEST(BceLossTest, HalfGivesLn2) {
  EXPECT_NEAR(BceLoss(0.5, 0.0).loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(BceLoss(0.5, 1.0).loss, std::log(2.0), 1e-15);
}

TEST(BceLossTest, VanishesAsPredictionApproachesLabel) {
  EXPECT_LT(BceLoss(1.0 - 1e-9, 1.0).loss, 1e-8);
  EXPECT_LT(BceLoss(1e-9, 0.0).loss, 1e-8);
  EXPECT_GE(BceLoss(1.0, 1.0).loss, 0.0);
  EXPECT_TRUE(std::isfinite(BceLoss(0.0, 1.0).loss));
}

TEST(BceLossTest, GradientMatchesFiniteDifferences) {
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const double p = rng.Uniform(0.05, 0.95);
    const double y = static_cast<double>(rng.Below(2));
    const double h = 1e-6;
    const double numeric = (BceLoss(p + h, y).loss - BceLoss(p - h, y).loss) / (2 * h);
    const double analytic = BceLoss(p, y).gradient;
    EXPECT_NEAR(analytic, (p - y) / (p * (1 - p)), 1e-12);
    EXPECT_NEAR(analytic, numeric, 1e-7 * std::max(1.0, std::abs(analytic)));
  }
}

}  // namespace
}  // namespace crossfire::nn
