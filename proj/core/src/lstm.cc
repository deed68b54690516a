#include "crossfire/lstm.h"

#include <algorithm>
#include <cmath>

#include "crossfire/error.h"
#include "crossfire/layers.h"

namespace crossfire::nn {
namespace {

void CheckParams(const LstmParams& p) {
  if (p.input_weight.rank() != 2 || p.recurrent_weight.rank() != 2 ||
      p.bias.rank() != 1) {
    throw ShapeError("lstm parameters must be [4u x d], [4u x u], [4u]");
  }
  const std::size_t u = p.recurrent_weight.dim(1);
  if (p.recurrent_weight.dim(0) != 4 * u || p.input_weight.dim(0) != 4 * u ||
      p.bias.dim(0) != 4 * u) {
    throw ShapeError("lstm parameter shapes inconsistent: input " +
                     ShapeToString(p.input_weight.shape()) + ", recurrent " +
                     ShapeToString(p.recurrent_weight.shape()) + ", bias " +
                     ShapeToString(p.bias.shape()));
  }
}

// Row-major transpose of an [r x c] matrix into [c x r].
std::vector<double> Transpose(const Tensor& m) {
  const std::size_t rows = m.dim(0), cols = m.dim(1);
  std::vector<double> t(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = m.at(r, c);
  }
  return t;
}

void Axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// Pre-activations -> activations in place, then the cell update.
void ActivateAndUpdate(double* z, const double* c_prev, double* c, double* tc,
                       double* h, std::size_t u) {
  for (std::size_t k = 0; k < u; ++k) {
    z[k] = Sigmoid(z[k]);
    z[u + k] = Sigmoid(z[u + k]);
    z[2 * u + k] = std::tanh(z[2 * u + k]);
    z[3 * u + k] = Sigmoid(z[3 * u + k]);
    c[k] = z[u + k] * c_prev[k] + z[k] * z[2 * u + k];
    tc[k] = std::tanh(c[k]);
    h[k] = z[3 * u + k] * tc[k];
  }
}

}  // namespace

LstmParams::LstmParams(std::size_t input_size, std::size_t units)
    : input_weight({4 * units, input_size}),
      recurrent_weight({4 * units, units}),
      bias({4 * units}) {}

void LstmParams::Initialize(Rng& rng) {
  const std::size_t u = units(), d = input_size();
  const double in_limit = std::sqrt(6.0 / static_cast<double>(d + u));
  const double rec_limit = std::sqrt(6.0 / static_cast<double>(2 * u));
  for (double& w : input_weight.values()) w = rng.Uniform(-in_limit, in_limit);
  for (double& w : recurrent_weight.values()) {
    w = rng.Uniform(-rec_limit, rec_limit);
  }
  bias.Fill(0.0);
  for (std::size_t k = 0; k < u; ++k) bias[u + k] = 1.0;
}

Tensor LstmTrace::Outputs() const {
  return Tensor({steps, units},
                std::vector<double>(hiddens.begin() + units, hiddens.end()));
}

LstmState LstmCell(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
                   const LstmParams& params) {
  CheckParams(params);
  const std::size_t u = params.units(), d = params.input_size();
  if (x.rank() != 1 || x.dim(0) != d || h_prev.shape() != Shape{u} ||
      c_prev.shape() != Shape{u}) {
    throw ShapeError("lstm cell: input " + ShapeToString(x.shape()) +
                     ", h " + ShapeToString(h_prev.shape()) + ", c " +
                     ShapeToString(c_prev.shape()) + " do not match d=" +
                     std::to_string(d) + ", u=" + std::to_string(u));
  }
  std::vector<double> z(params.bias.values().begin(), params.bias.values().end());
  for (std::size_t r = 0; r < 4 * u; ++r) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += params.input_weight.at(r, j) * x[j];
    for (std::size_t j = 0; j < u; ++j) {
      acc += params.recurrent_weight.at(r, j) * h_prev[j];
    }
    z[r] += acc;
  }
  LstmState out{Tensor({u}), Tensor({u})};
  std::vector<double> tc(u);
  ActivateAndUpdate(z.data(), c_prev.data(), out.c.data(), tc.data(),
                    out.h.data(), u);
  return out;
}

LstmTrace LstmForward(const Tensor& inputs, const LstmParams& params) {
  CheckParams(params);
  const std::size_t u = params.units(), d = params.input_size(), g = 4 * u;
  if (inputs.rank() != 2 || inputs.dim(1) != d) {
    throw ShapeError("lstm forward: inputs " + ShapeToString(inputs.shape()) +
                     " expected [T x " + std::to_string(d) + "]");
  }
  const std::size_t steps = inputs.dim(0);
  LstmTrace trace;
  trace.steps = steps;
  trace.units = u;
  trace.gates.assign(steps * g, 0.0);
  trace.cells.assign((steps + 1) * u, 0.0);
  trace.hiddens.assign((steps + 1) * u, 0.0);
  trace.cell_tanh.assign(steps * u, 0.0);

  const std::vector<double> wx_t = Transpose(params.input_weight);
  const std::vector<double> wh_t = Transpose(params.recurrent_weight);
  for (std::size_t t = 0; t < steps; ++t) {
    double* z = trace.gates.data() + t * g;
    std::copy(params.bias.data(), params.bias.data() + g, z);
    const double* x = inputs.data() + t * d;
    for (std::size_t j = 0; j < d; ++j) {
      if (x[j] != 0.0) Axpy(x[j], wx_t.data() + j * g, z, g);
    }
    const double* h_prev = trace.hiddens.data() + t * u;
    for (std::size_t j = 0; j < u; ++j) {
      if (h_prev[j] != 0.0) Axpy(h_prev[j], wh_t.data() + j * g, z, g);
    }
    ActivateAndUpdate(z, trace.cells.data() + t * u,
                      trace.cells.data() + (t + 1) * u,
                      trace.cell_tanh.data() + t * u,
                      trace.hiddens.data() + (t + 1) * u, u);
  }
  return trace;
}

Tensor LstmBackward(const Tensor& inputs, const LstmParams& params,
                    const LstmTrace& trace, const Tensor& doutputs,
                    LstmParams& grads) {
  CheckParams(params);
  RequireSameShape(params.input_weight, grads.input_weight, "lstm input weight gradient");
  RequireSameShape(params.recurrent_weight, grads.recurrent_weight,
                   "lstm recurrent weight gradient");
  const std::size_t u = params.units(), d = params.input_size(), g = 4 * u;
  const std::size_t steps = trace.steps;
  if (doutputs.shape() != Shape{steps, u} ||
      inputs.shape() != Shape{steps, d}) {
    throw ShapeError("lstm backward: output gradient " +
                     ShapeToString(doutputs.shape()) + " / inputs " +
                     ShapeToString(inputs.shape()) + " do not match trace");
  }
  Tensor dinputs({steps, d});
  std::vector<double> dh_next(u, 0.0), dc_next(u, 0.0), dz(g);
  const double* wx = params.input_weight.data();
  const double* wh = params.recurrent_weight.data();
  double* dwx = grads.input_weight.data();
  double* dwh = grads.recurrent_weight.data();
  for (std::size_t t = steps; t-- > 0;) {
    const double* gate = trace.gates.data() + t * g;
    const double* c_prev = trace.cells.data() + t * u;
    const double* h_prev = trace.hiddens.data() + t * u;
    const double* tc = trace.cell_tanh.data() + t * u;
    const double* dout = doutputs.data() + t * u;
    for (std::size_t k = 0; k < u; ++k) {
      const double i = gate[k], f = gate[u + k], cand = gate[2 * u + k],
                   o = gate[3 * u + k];
      const double dh = dout[k] + dh_next[k];
      const double dc = dh * o * (1.0 - tc[k] * tc[k]) + dc_next[k];
      dz[k] = dc * cand * i * (1.0 - i);
      dz[u + k] = dc * c_prev[k] * f * (1.0 - f);
      dz[2 * u + k] = dc * i * (1.0 - cand * cand);
      dz[3 * u + k] = dh * tc[k] * o * (1.0 - o);
      dc_next[k] = dc * f;
    }
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    const double* x = inputs.data() + t * d;
    double* dx = dinputs.data() + t * d;
    for (std::size_t r = 0; r < g; ++r) {
      const double gr = dz[r];
      grads.bias[r] += gr;
      if (gr == 0.0) continue;
      Axpy(gr, x, dwx + r * d, d);
      Axpy(gr, h_prev, dwh + r * u, u);
      Axpy(gr, wx + r * d, dx, d);
      Axpy(gr, wh + r * u, dh_next.data(), u);
    }
  }
  return dinputs;
}

}  // namespace crossfire::nn
