// SPDX-License-Identifier: Apache-2.0
//
// Dense row-major tensors with a gradient slot, and the reverse-mode tape
// that records backward closures as operations run.
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace patchrnn::nn {

using Shape = std::vector<std::size_t>;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Shared handle: copies alias the same storage, which is how one parameter
/// is referenced from several places (the twin encoder, the optimizer).
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values,
                     bool requires_grad = false);

  explicit operator bool() const { return impl_ != nullptr; }
  bool same_as(const Tensor& other) const { return impl_ == other.impl_; }

  const Shape& shape() const { return impl_->shape; }
  std::size_t size() const { return impl_->values.size(); }
  /// Matrix view: rank-1 tensors are one row, higher ranks fold into rows.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<double> values() { return impl_->values; }
  std::span<const double> values() const { return impl_->values; }
  double& operator[](std::size_t i) { return impl_->values[i]; }
  double operator[](std::size_t i) const { return impl_->values[i]; }

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool on) { impl_->requires_grad = on; }
  bool has_grad() const { return !impl_->grad.empty(); }
  /// Allocates a zero gradient on first use.
  std::span<double> grad();
  std::span<const double> grad_or_empty() const { return impl_->grad; }
  void zero_grad();

  const std::string& name() const { return impl_->name; }
  void set_name(std::string name) { impl_->name = std::move(name); }

  MatrixMap matrix();
  ConstMatrixMap matrix() const;
  MatrixMap grad_matrix();

  /// Deep copy (new storage, no gradient).
  Tensor clone() const;

 private:
  struct Impl {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;
    bool requires_grad = false;
    std::string name;
  };
  std::shared_ptr<Impl> impl_;
};

/// Throws NumericalError if any value is NaN or infinite.
void check_finite(std::span<const double> values, std::string_view where);

/// Records backward closures in execution order and replays them in reverse.
class Tape {
 public:
  void record(std::function<void()> backward) {
    ops_.push_back(std::move(backward));
  }

  /// Seeds d(loss)/d(loss) = 1 and runs every recorded closure in reverse.
  /// `loss` must hold exactly one element.
  void backward(Tensor& loss);

  std::size_t size() const { return ops_.size(); }
  void clear() { ops_.clear(); }

 private:
  std::vector<std::function<void()>> ops_;
};

}  // namespace patchrnn::nn
