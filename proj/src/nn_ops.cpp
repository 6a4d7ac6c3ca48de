// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "patchrnn/errors.hpp"

namespace patchrnn::nn {

namespace {

Tensor make_output(Shape shape, bool requires_grad) {
  return Tensor::zeros(std::move(shape), requires_grad);
}

void expect(bool condition, const std::string& what) {
  if (!condition) throw DimensionMismatch(what);
}

}  // namespace

Tensor linear(Tape& tape, const Tensor& x, const Tensor& weight,
              const Tensor& bias) {
  const std::size_t n = x.rows();
  const std::size_t in = x.cols();
  const std::size_t out = weight.rows();
  expect(weight.cols() == in && bias.size() == out,
         "linear: x " + shape_string(x.shape()) + ", W " +
             shape_string(weight.shape()) + ", b " + shape_string(bias.shape()));
  const bool grad = x.requires_grad() || weight.requires_grad() ||
                    bias.requires_grad();
  Tensor y = make_output({n, out}, grad);
  auto b = Eigen::Map<const Eigen::RowVectorXd>(bias.values().data(),
                                                static_cast<Eigen::Index>(out));
  y.matrix().noalias() = x.matrix() * weight.matrix().transpose();
  y.matrix().rowwise() += b;
  check_finite(y.values(), "linear");
  if (grad) {
    tape.record([x = x, weight = weight, bias = bias, y]() mutable {
      if (!y.has_grad()) return;
      auto dy = y.grad_matrix();
      if (weight.requires_grad()) {
        weight.grad_matrix().noalias() += dy.transpose() * x.matrix();
      }
      if (bias.requires_grad()) {
        auto db = Eigen::Map<Eigen::RowVectorXd>(
            bias.grad().data(), static_cast<Eigen::Index>(bias.size()));
        db += dy.colwise().sum();
      }
      if (x.requires_grad()) {
        x.grad_matrix().noalias() += dy * weight.matrix();
      }
    });
  }
  return y;
}

Tensor relu(Tape& tape, const Tensor& x) {
  Tensor y = make_output(x.shape(), x.requires_grad());
  auto in = x.values();
  auto out = y.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::max(0.0, in[i]);
  if (x.requires_grad()) {
    tape.record([x = x, y]() mutable {
      if (!y.has_grad()) return;
      auto dy = y.grad();
      auto dx = x.grad();
      auto v = x.values();
      for (std::size_t i = 0; i < dy.size(); ++i) {
        if (v[i] > 0.0) dx[i] += dy[i];
      }
    });
  }
  return y;
}

Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts) {
  expect(!parts.empty(), "concat_cols: no inputs");
  const std::size_t n = parts.front().rows();
  std::size_t total = 0;
  bool grad = false;
  for (const Tensor& p : parts) {
    expect(p.rows() == n, "concat_cols: row counts differ");
    total += p.cols();
    grad = grad || p.requires_grad();
  }
  Tensor y = make_output({n, total}, grad);
  auto ym = y.matrix();
  std::size_t offset = 0;
  for (const Tensor& p : parts) {
    ym.middleCols(static_cast<Eigen::Index>(offset),
                  static_cast<Eigen::Index>(p.cols())) = p.matrix();
    offset += p.cols();
  }
  if (grad) {
    tape.record([parts = parts, y]() mutable {
      if (!y.has_grad()) return;
      auto dy = y.grad_matrix();
      std::size_t off = 0;
      for (Tensor p : parts) {
        if (p.requires_grad()) {
          p.grad_matrix() += dy.middleCols(static_cast<Eigen::Index>(off),
                                           static_cast<Eigen::Index>(p.cols()));
        }
        off += p.cols();
      }
    });
  }
  return y;
}

Tensor gather_rows(Tape& tape, const Tensor& table,
                   std::span<const std::size_t> indices) {
  const std::size_t d = table.cols();
  const std::size_t vocab = table.rows();
  Tensor y = make_output({indices.size(), d}, table.requires_grad());
  auto src = table.values();
  auto dst = y.values();
  for (std::size_t r = 0; r < indices.size(); ++r) {
    expect(indices[r] < vocab, "gather_rows: index out of range");
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(indices[r] * d), d,
                dst.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  if (table.requires_grad()) {
    std::vector<std::size_t> idx(indices.begin(), indices.end());
    tape.record([table = table, y, idx = std::move(idx), d]() mutable {
      if (!y.has_grad()) return;
      auto dy = y.grad();
      auto dt = table.grad();
      for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t c = 0; c < d; ++c) dt[idx[r] * d + c] += dy[r * d + c];
      }
    });
  }
  return y;
}

Tensor sum_squares(Tape& tape, const Tensor& x) {
  Tensor y = make_output({1}, x.requires_grad());
  double s = 0.0;
  for (double v : x.values()) s += v * v;
  y[0] = s;
  if (x.requires_grad()) {
    tape.record([x = x, y]() mutable {
      if (!y.has_grad()) return;
      const double g = y.grad()[0];
      auto dx = x.grad();
      auto v = x.values();
      for (std::size_t i = 0; i < v.size(); ++i) dx[i] += 2.0 * v[i] * g;
    });
  }
  return y;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

Tensor softmax_cross_entropy(Tape& tape, const Tensor& logits,
                             std::span<const int> labels,
                             std::span<const double> weights, double normalizer,
                             std::vector<double>* probabilities) {
  const std::size_t n = logits.rows();
  const std::size_t classes = logits.cols();
  expect(labels.size() == n, "softmax_cross_entropy: one label per row");
  expect(weights.empty() || weights.size() == n,
         "softmax_cross_entropy: one weight per row");
  const double denom = normalizer > 0.0 ? normalizer : static_cast<double>(n);

  std::vector<double> probs(n * classes);
  double loss = 0.0;
  auto z = logits.values();
  for (std::size_t r = 0; r < n; ++r) {
    const auto label = static_cast<std::size_t>(labels[r]);
    expect(labels[r] >= 0 && label < classes,
           "softmax_cross_entropy: label out of range");
    auto row = z.subspan(r * classes, classes);
    const double peak = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - peak);
    const double log_z = peak + std::log(sum);
    for (std::size_t c = 0; c < classes; ++c) {
      probs[r * classes + c] = std::exp(row[c] - log_z);
    }
    const double w = weights.empty() ? 1.0 : weights[r];
    loss += w * (log_z - row[label]);
  }
  Tensor y = make_output({1}, logits.requires_grad());
  y[0] = loss / denom;
  check_finite(y.values(), "softmax_cross_entropy");
  if (probabilities) *probabilities = probs;
  if (logits.requires_grad()) {
    std::vector<int> lab(labels.begin(), labels.end());
    std::vector<double> w(weights.begin(), weights.end());
    tape.record([logits = logits, y, probs = std::move(probs), lab = std::move(lab),
                 w = std::move(w), classes, denom]() mutable {
      if (!y.has_grad()) return;
      const double g = y.grad()[0] / denom;
      auto dz = logits.grad();
      for (std::size_t r = 0; r < lab.size(); ++r) {
        const double scale = g * (w.empty() ? 1.0 : w[r]);
        for (std::size_t c = 0; c < classes; ++c) {
          const double target = static_cast<int>(c) == lab[r] ? 1.0 : 0.0;
          dz[r * classes + c] += scale * (probs[r * classes + c] - target);
        }
      }
    });
  }
  return y;
}

}  // namespace patchrnn::nn
