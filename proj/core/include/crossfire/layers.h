#ifndef CROSSFIRE_LAYERS_H
#define CROSSFIRE_LAYERS_H

#include "crossfire/tensor.h"

namespace crossfire::nn {

// Fully connected layer: y[j] = sum_i w[j, i] * x[i] + b[j].
// x: [n_in], w: [n_out x n_in], b: [n_out].
Tensor DenseForward(const Tensor& x, const Tensor& w, const Tensor& b);

// Backward pass of DenseForward. Adds the weight and bias gradients into
// `dw` and `db` and, when `dx` is non-null, overwrites it with the input
// gradient.
void DenseBackward(const Tensor& x, const Tensor& w, const Tensor& dy,
                   Tensor* dx, Tensor& dw, Tensor& db);

Tensor ReluForward(const Tensor& x);
// Subgradient 0 at x == 0.
Tensor ReluBackward(const Tensor& x, const Tensor& dy);

double Sigmoid(double x);
Tensor SigmoidForward(const Tensor& x);
// Takes the forward *output* y = sigmoid(x).
Tensor SigmoidBackward(const Tensor& y, const Tensor& dy);

// Valid (unpadded), stride-1 cross-correlation.
// input: [H x W] (one channel) or [C x H x W].
// kernels: [K x kh x kw] (one channel) or [K x C x kh x kw].
// bias: [K]. Output: [K x (H-kh+1) x (W-kw+1)].
Tensor Conv2dForward(const Tensor& input, const Tensor& kernels,
                     const Tensor& bias);

// Adds kernel and bias gradients into `dk`/`db`; writes the input gradient
// (shaped like `input`) into `dinput` when non-null.
void Conv2dBackward(const Tensor& input, const Tensor& kernels,
                    const Tensor& dout, Tensor* dinput, Tensor& dk,
                    Tensor& db);

struct LossAndGradient {
  double loss;
  double gradient;  // d loss / d prediction
};

// Binary cross-entropy on a probability. The prediction is clamped to
// [1e-12, 1 - 1e-12] before the log.
LossAndGradient BceLoss(double prediction, double label);

}  // namespace crossfire::nn

#endif  // CROSSFIRE_LAYERS_H
