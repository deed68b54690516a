#ifndef CROSSFIRE_TENSOR_H
#define CROSSFIRE_TENSOR_H

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace crossfire::nn {

using Shape = std::vector<std::size_t>;

std::string ShapeToString(const Shape& shape);

// Dense row-major array of doubles. A default-constructed tensor is empty
// (rank 0, no values); every other tensor has all dimensions >= 1 and
// exactly product(shape) values.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor ZerosLike(const Tensor& other) { return Tensor(other.shape_); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double& at(std::size_t i, std::size_t j) { return values_[i * shape_[1] + j]; }
  double at(std::size_t i, std::size_t j) const {
    return values_[i * shape_[1] + j];
  }
  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return values_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[(i * shape_[1] + j) * shape_[2] + k];
  }

  void Fill(double value);
  // Reinterprets the values under a new shape with the same element count.
  Tensor Reshaped(Shape shape) const;

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

// Throws ShapeError naming both shapes unless a.shape() == b.shape().
void RequireSameShape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace crossfire::nn

#endif  // CROSSFIRE_TENSOR_H
