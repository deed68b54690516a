#include "crossfire/tensor.h"

#include <algorithm>
#include <functional>
#include <numeric>

#include "crossfire/error.h"

namespace crossfire::nn {
namespace {

std::size_t Product(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have rank >= 1");
  for (std::size_t d : shape) {
    if (d == 0) {
      throw ShapeError("tensor dimensions must be >= 1, got " +
                       ShapeToString(shape));
    }
  }
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

std::string ShapeToString(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += 'x';
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(Product(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (Product(shape_) != values_.size()) {
    throw ShapeError("shape " + ShapeToString(shape_) + " needs " +
                     std::to_string(Product(shape_)) + " values, got " +
                     std::to_string(values_.size()));
  }
}

void Tensor::Fill(double value) {
  std::fill(values_.begin(), values_.end(), value);
}

Tensor Tensor::Reshaped(Shape shape) const { return Tensor(std::move(shape), values_); }

void RequireSameShape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch " +
                     ShapeToString(a.shape()) + " vs " +
                     ShapeToString(b.shape()));
  }
}

}  // namespace crossfire::nn
