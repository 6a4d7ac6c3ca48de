// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "patchrnn/errors.hpp"
#include "patchrnn/nn/tensor.hpp"

namespace patchrnn::nn {

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  std::vector<double> values(element_count(shape), 0.0);
  return from(std::move(shape), std::move(values), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values,
                    bool requires_grad) {
  if (element_count(shape) != values.size()) {
    throw DimensionMismatch("tensor shape " + shape_string(shape) + " needs " +
                            std::to_string(element_count(shape)) +
                            " values, got " + std::to_string(values.size()));
  }
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  t.impl_->shape = std::move(shape);
  t.impl_->values = std::move(values);
  t.impl_->requires_grad = requires_grad;
  return t;
}

std::size_t Tensor::rows() const {
  const Shape& s = impl_->shape;
  if (s.size() <= 1) return 1;
  std::size_t r = 1;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) r *= s[i];
  return r;
}

std::size_t Tensor::cols() const {
  const Shape& s = impl_->shape;
  return s.empty() ? 1 : s.back();
}

std::span<double> Tensor::grad() {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->values.size(), 0.0);
  return impl_->grad;
}

void Tensor::zero_grad() {
  std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

MatrixMap Tensor::matrix() {
  return MatrixMap(impl_->values.data(), static_cast<Eigen::Index>(rows()),
                   static_cast<Eigen::Index>(cols()));
}

ConstMatrixMap Tensor::matrix() const {
  return ConstMatrixMap(impl_->values.data(),
                        static_cast<Eigen::Index>(rows()),
                        static_cast<Eigen::Index>(cols()));
}

MatrixMap Tensor::grad_matrix() {
  return MatrixMap(grad().data(), static_cast<Eigen::Index>(rows()),
                   static_cast<Eigen::Index>(cols()));
}

Tensor Tensor::clone() const {
  Tensor t = from(impl_->shape, impl_->values, impl_->requires_grad);
  t.set_name(impl_->name);
  return t;
}

void check_finite(std::span<const double> values, std::string_view where) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite value in " + std::string(where));
    }
  }
}

void Tape::backward(Tensor& loss) {
  if (loss.size() != 1) {
    throw DimensionMismatch("backward() needs a scalar loss, got shape " +
                            shape_string(loss.shape()));
  }
  loss.grad()[0] += 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

}  // namespace patchrnn::nn
