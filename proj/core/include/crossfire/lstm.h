#ifndef CROSSFIRE_LSTM_H
#define CROSSFIRE_LSTM_H

#include <cstddef>
#include <vector>

#include "crossfire/rng.h"
#include "crossfire/tensor.h"

namespace crossfire::nn {

// Parameters of one LSTM layer with `units` hidden units over `input_size`
// inputs. Gate rows are stacked in the order input, forget, candidate,
// output, each block `units` rows tall.
struct LstmParams {
  Tensor input_weight;      // [4u x d]
  Tensor recurrent_weight;  // [4u x u]
  Tensor bias;              // [4u]

  LstmParams() = default;
  LstmParams(std::size_t input_size, std::size_t units);

  std::size_t units() const { return recurrent_weight.dim(1); }
  std::size_t input_size() const { return input_weight.dim(1); }

  // Glorot-uniform weights, zero biases except the forget block set to 1.
  void Initialize(Rng& rng);
};

struct LstmState {
  Tensor h;
  Tensor c;
};

// One step: gates via sigmoid (i, f, o) and tanh (g),
// c = f * c_prev + i * g, h = o * tanh(c).
LstmState LstmCell(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
                   const LstmParams& params);

// Activations recorded by LstmForward for the backward pass.
struct LstmTrace {
  std::size_t steps = 0;
  std::size_t units = 0;
  std::vector<double> gates;   // steps x 4u, post-activation
  std::vector<double> cells;   // (steps + 1) x u, row 0 is the zero state
  std::vector<double> hiddens; // (steps + 1) x u, row 0 is the zero state
  std::vector<double> cell_tanh;  // steps x u

  // Hidden state after step t (0-based) as a [steps x u] tensor row.
  Tensor Outputs() const;
};

// Unrolls the layer over inputs [T x d] from a zero initial state.
LstmTrace LstmForward(const Tensor& inputs, const LstmParams& params);

// Backpropagation through time. `doutputs` [T x u] holds the loss gradient
// with respect to each step's hidden output. Adds parameter gradients into
// `grads` and returns the input gradient [T x d].
Tensor LstmBackward(const Tensor& inputs, const LstmParams& params,
                    const LstmTrace& trace, const Tensor& doutputs,
                    LstmParams& grads);

}  // namespace crossfire::nn

#endif  // CROSSFIRE_LSTM_H
