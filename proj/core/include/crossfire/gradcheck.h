#ifndef CROSSFIRE_GRADCHECK_H
#define CROSSFIRE_GRADCHECK_H

#include <functional>

#include "crossfire/tensor.h"

namespace crossfire::nn {

// Central finite-difference gradient of `loss` with respect to every element
// of `param`. `param` is perturbed in place and restored.
Tensor NumericalGradient(const std::function<double()>& loss, Tensor& param,
                         double eps = 1e-5);

// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor).
double MaxRelativeError(const Tensor& analytic, const Tensor& numeric,
                        double floor = 1e-6);

}  // namespace crossfire::nn

#endif  // CROSSFIRE_GRADCHECK_H
