#include "crossfire/layers.h"

#include <algorithm>
#include <cmath>

#include "crossfire/error.h"

namespace crossfire::nn {
namespace {

struct ConvDims {
  std::size_t channels, height, width, kernels, kh, kw, out_h, out_w;
};

ConvDims CheckConv(const Tensor& input, const Tensor& kernels,
                   const Tensor& bias) {
  ConvDims d{};
  if (input.rank() == 2) {
    d.channels = 1;
    d.height = input.dim(0);
    d.width = input.dim(1);
  } else if (input.rank() == 3) {
    d.channels = input.dim(0);
    d.height = input.dim(1);
    d.width = input.dim(2);
  } else {
    throw ShapeError("conv2d input must be [H x W] or [C x H x W], got " +
                     ShapeToString(input.shape()));
  }
  std::size_t kernel_channels;
  if (kernels.rank() == 3) {
    kernel_channels = 1;
    d.kh = kernels.dim(1);
    d.kw = kernels.dim(2);
  } else if (kernels.rank() == 4) {
    kernel_channels = kernels.dim(1);
    d.kh = kernels.dim(2);
    d.kw = kernels.dim(3);
  } else {
    throw ShapeError("conv2d kernels must be [K x kh x kw] or [K x C x kh x kw], got " +
                     ShapeToString(kernels.shape()));
  }
  d.kernels = kernels.dim(0);
  if (kernel_channels != d.channels || d.kh > d.height || d.kw > d.width) {
    throw ShapeError("conv2d kernels " + ShapeToString(kernels.shape()) +
                     " do not fit input " + ShapeToString(input.shape()));
  }
  if (bias.rank() != 1 || bias.dim(0) != d.kernels) {
    throw ShapeError("conv2d bias " + ShapeToString(bias.shape()) +
                     " does not match kernels " +
                     ShapeToString(kernels.shape()));
  }
  d.out_h = d.height - d.kh + 1;
  d.out_w = d.width - d.kw + 1;
  return d;
}

}  // namespace

Tensor DenseForward(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (w.rank() != 2 || x.rank() != 1 || b.rank() != 1 ||
      w.dim(1) != x.dim(0) || w.dim(0) != b.dim(0)) {
    throw ShapeError("dense: weights " + ShapeToString(w.shape()) +
                     " incompatible with input " + ShapeToString(x.shape()) +
                     " / bias " + ShapeToString(b.shape()));
  }
  const std::size_t n_out = w.dim(0), n_in = w.dim(1);
  Tensor y({n_out});
  for (std::size_t j = 0; j < n_out; ++j) {
    const double* row = w.data() + j * n_in;
    double acc = b[j];
    for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * x[i];
    y[j] = acc;
  }
  return y;
}

void DenseBackward(const Tensor& x, const Tensor& w, const Tensor& dy,
                   Tensor* dx, Tensor& dw, Tensor& db) {
  RequireSameShape(w, dw, "dense weight gradient");
  if (dy.rank() != 1 || dy.dim(0) != w.dim(0) || x.rank() != 1 ||
      x.dim(0) != w.dim(1) || db.size() != dy.size()) {
    throw ShapeError("dense backward: output gradient " +
                     ShapeToString(dy.shape()) + " incompatible with weights " +
                     ShapeToString(w.shape()));
  }
  const std::size_t n_out = w.dim(0), n_in = w.dim(1);
  if (dx != nullptr) *dx = Tensor({n_in});
  for (std::size_t j = 0; j < n_out; ++j) {
    const double g = dy[j];
    db[j] += g;
    if (g == 0.0) continue;
    double* dw_row = dw.data() + j * n_in;
    const double* w_row = w.data() + j * n_in;
    for (std::size_t i = 0; i < n_in; ++i) dw_row[i] += g * x[i];
    if (dx != nullptr) {
      double* out = dx->data();
      for (std::size_t i = 0; i < n_in; ++i) out[i] += g * w_row[i];
    }
  }
}

Tensor ReluForward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.values()) v = std::max(0.0, v);
  return y;
}

Tensor ReluBackward(const Tensor& x, const Tensor& dy) {
  RequireSameShape(x, dy, "relu backward");
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!(x[i] > 0.0)) dx[i] = 0.0;
  }
  return dx;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor SigmoidForward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.values()) v = Sigmoid(v);
  return y;
}

Tensor SigmoidBackward(const Tensor& y, const Tensor& dy) {
  RequireSameShape(y, dy, "sigmoid backward");
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= y[i] * (1.0 - y[i]);
  return dx;
}

Tensor Conv2dForward(const Tensor& input, const Tensor& kernels,
                     const Tensor& bias) {
  const ConvDims d = CheckConv(input, kernels, bias);
  Tensor out({d.kernels, d.out_h, d.out_w});
  const double* in = input.data();
  const double* ker = kernels.data();
  double* o = out.data();
  for (std::size_t k = 0; k < d.kernels; ++k) {
    double* plane = o + k * d.out_h * d.out_w;
    std::fill(plane, plane + d.out_h * d.out_w, bias[k]);
    for (std::size_t c = 0; c < d.channels; ++c) {
      const double* in_c = in + c * d.height * d.width;
      const double* ker_kc = ker + (k * d.channels + c) * d.kh * d.kw;
      for (std::size_t r = 0; r < d.out_h; ++r) {
        double* out_row = plane + r * d.out_w;
        for (std::size_t a = 0; a < d.kh; ++a) {
          const double* in_row = in_c + (r + a) * d.width;
          const double* ker_row = ker_kc + a * d.kw;
          if (d.kw > d.out_w) {
            // Wide kernels: keep the longer loop innermost.
            for (std::size_t col = 0; col < d.out_w; ++col) {
              double acc = 0.0;
              for (std::size_t b = 0; b < d.kw; ++b) acc += ker_row[b] * in_row[col + b];
              out_row[col] += acc;
            }
            continue;
          }
          for (std::size_t b = 0; b < d.kw; ++b) {
            const double wgt = ker_row[b];
            for (std::size_t col = 0; col < d.out_w; ++col) {
              out_row[col] += wgt * in_row[col + b];
            }
          }
        }
      }
    }
  }
  return out;
}

void Conv2dBackward(const Tensor& input, const Tensor& kernels,
                    const Tensor& dout, Tensor* dinput, Tensor& dk,
                    Tensor& db) {
  const ConvDims d = CheckConv(input, kernels, db);
  RequireSameShape(kernels, dk, "conv2d kernel gradient");
  if (dout.shape() != Shape{d.kernels, d.out_h, d.out_w}) {
    throw ShapeError("conv2d backward: output gradient " +
                     ShapeToString(dout.shape()) + " expected " +
                     ShapeToString({d.kernels, d.out_h, d.out_w}));
  }
  if (dinput != nullptr) *dinput = Tensor::ZerosLike(input);
  const double* in = input.data();
  const double* ker = kernels.data();
  for (std::size_t k = 0; k < d.kernels; ++k) {
    const double* g = dout.data() + k * d.out_h * d.out_w;
    double bias_grad = 0.0;
    for (std::size_t i = 0; i < d.out_h * d.out_w; ++i) bias_grad += g[i];
    db[k] += bias_grad;
    for (std::size_t c = 0; c < d.channels; ++c) {
      const double* in_c = in + c * d.height * d.width;
      const std::size_t koff = (k * d.channels + c) * d.kh * d.kw;
      if (d.kw > d.out_w) {
        for (std::size_t r = 0; r < d.out_h; ++r) {
          for (std::size_t a = 0; a < d.kh; ++a) {
            const double* ker_row = ker + koff + a * d.kw;
            double* dk_row = dk.data() + koff + a * d.kw;
            for (std::size_t col = 0; col < d.out_w; ++col) {
              const double gv = g[r * d.out_w + col];
              const double* in_row = in_c + (r + a) * d.width + col;
              for (std::size_t b = 0; b < d.kw; ++b) dk_row[b] += gv * in_row[b];
              if (dinput != nullptr) {
                double* din_row =
                    dinput->data() + c * d.height * d.width + (r + a) * d.width + col;
                for (std::size_t b = 0; b < d.kw; ++b) din_row[b] += gv * ker_row[b];
              }
            }
          }
        }
        continue;
      }
      for (std::size_t a = 0; a < d.kh; ++a) {
        for (std::size_t b = 0; b < d.kw; ++b) {
          double acc = 0.0;
          const double wgt = ker[koff + a * d.kw + b];
          for (std::size_t r = 0; r < d.out_h; ++r) {
            const double* g_row = g + r * d.out_w;
            const double* in_row = in_c + (r + a) * d.width + b;
            for (std::size_t col = 0; col < d.out_w; ++col) {
              acc += g_row[col] * in_row[col];
            }
            if (dinput != nullptr) {
              double* din_row =
                  dinput->data() + c * d.height * d.width + (r + a) * d.width + b;
              for (std::size_t col = 0; col < d.out_w; ++col) {
                din_row[col] += wgt * g_row[col];
              }
            }
          }
          dk[koff + a * d.kw + b] += acc;
        }
      }
    }
  }
}

LossAndGradient BceLoss(double prediction, double label) {
  constexpr double kClamp = 1e-12;
  const double p = std::clamp(prediction, kClamp, 1.0 - kClamp);
  const double loss = -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
  return {loss, (p - label) / (p * (1.0 - p))};
}

}  // namespace crossfire::nn
