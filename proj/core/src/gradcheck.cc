#include "crossfire/gradcheck.h"

#include <algorithm>
#include <cmath>

namespace crossfire::nn {

Tensor NumericalGradient(const std::function<double()>& loss, Tensor& param,
                         double eps) {
  Tensor grad = Tensor::ZerosLike(param);
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double saved = param[i];
    param[i] = saved + eps;
    const double up = loss();
    param[i] = saved - eps;
    const double down = loss();
    param[i] = saved;
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

double MaxRelativeError(const Tensor& analytic, const Tensor& numeric,
                        double floor) {
  RequireSameShape(analytic, numeric, "gradient check");
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i], n = numeric[i];
    const double denom = std::max({std::abs(a), std::abs(n), floor});
    worst = std::max(worst, std::abs(a - n) / denom);
  }
  return worst;
}

}  // namespace crossfire::nn
